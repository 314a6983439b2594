"""Command-line front end: reproducible experiments with JSON/CSV reports.

Exit codes: 0 success, 2 validation failure, 3 unsupported system,
4 I/O error.  All reports are emitted with sorted keys so identical
inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .bounds_reduction import bound_constants, cover_list, interval_cover, reduce_system
from .exact_reals import FactoredReal
from .exterior_algebra import Subspace
from .filtration import (
    UnsupportedSystemError,
    exceptional_subspace,
    filtration,
    special_case_T,
    weight,
)
from .infima_lab import (
    SystemInstance,
    gap_experiment,
    minkowski_check,
    scan_system,
    slope_csv,
    slope_profile,
    successive_infima,
)
from .places_heights import Place
from .twisted_system import (
    TwistedPair,
    ValidationError,
    frac_str,
    pair_from_json,
    pair_invariants,
    pair_to_json,
    parse_frac,
    theta_of,
    alpha_of,
    validate,
)

__all__ = ["main", "cmd_dispatch", "RunConfig"]


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    out_path: str | None = None
    q_grid: tuple[Fraction, ...] = ()
    box: int | None = None
    precision: int = 12
    seed: int = 0


def _fail(code: int, msg: str) -> int:
    print(f"heightlab: {msg}", file=sys.stderr)
    return code


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(obj, out_path, as_csv: bool = False) -> None:
    if as_csv:
        text = obj
    else:
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _factored_json(x: FactoredReal, precision: int) -> dict:
    val, err = x.log10(precision)
    return {
        "factored": x.to_json(),
        "log10": f"{float(val):.{precision}g}",
    }


def _subspace_json(s: Subspace) -> dict:
    return {
        "ambient": s.n,
        "dim": s.dim,
        "basis": [[frac_str(a) for a in row] for row in s.rows],
    }


def _subspace_from_json(data) -> Subspace:
    return Subspace(int(data["ambient"]), [[parse_frac(a) for a in row] for row in data["basis"]])


def _load_pair(path: str) -> TwistedPair:
    return pair_from_json(_load_json(path))


def _load_system(path: str) -> SystemInstance:
    data = _load_json(path)
    places = {}
    for entry in data["places"]:
        forms = tuple(tuple(parse_frac(a) for a in f) for f in entry["forms"])
        exps = tuple(parse_frac(c) for c in entry["exps"])
        places[Place.parse(entry["place"])] = (forms, exps)
    return SystemInstance(int(data["n"]), parse_frac(data["epsilon"]), places)


def _filtration_json(pair: TwistedPair) -> dict:
    chain = filtration(pair)
    entries = []
    for l, sub in enumerate(chain.subspaces):
        entries.append(
            {
                "basis": [[frac_str(a) for a in row] for row in sub.rows],
                "dim": sub.dim,
                "weight": frac_str(chain.weights[l]),
                "slope": frac_str(chain.slopes[l - 1]) if l >= 1 else None,
            }
        )
    return {"chain": entries}


def _infima_json(est, precision: int) -> dict:
    return {
        "q": frac_str(est.q),
        "box": est.box,
        "lambdas": [_factored_json(l, precision) for l in est.lambdas],
        "achievers": [list(a) for a in est.achievers],
        "spans": [_subspace_json(s) for s in est.spans],
    }


def _parse_qgrid(spec: str) -> list[Fraction]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError("qgrid must be a:b:steps")
    a, b, steps = Fraction(parts[0]), Fraction(parts[1]), int(parts[2])
    if steps < 1 or a < 2 or b < a:
        raise ValueError("qgrid needs 2 <= a <= b and steps >= 1")
    if steps == 1:
        return [a]
    ratio = (float(b) / float(a)) ** (1.0 / (steps - 1))
    out = []
    for k in range(steps):
        q = Fraction(round(float(a) * ratio ** k))
        if not out or q > out[-1]:
            out.append(q)
    return out


def cmd_dispatch(argv) -> int:
    """Parse arguments, run one subcommand, write reports."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        return _fail(2, f"validation failure: {exc}")
    except UnsupportedSystemError as exc:
        return _fail(3, f"unsupported system: {exc}")
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(4, f"I/O error: {exc}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heightlab",
        description="Exact twisted heights, filtrations, infima search and bound tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_pair=False, needs_system=False, **flags):
        p = sub.add_parser(name)
        if needs_pair:
            p.add_argument("pair", help="path to a pair JSON file")
        if needs_system:
            p.add_argument("system", help="path to a system JSON file")
        for flag, kw in flags.items():
            p.add_argument(f"--{flag}", **kw)
        p.add_argument("--out", default=None)
        p.add_argument("--precision", type=int, default=12)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=fn)
        return p

    add("validate", _cmd_validate, needs_pair=True)
    add("invariants", _cmd_invariants, needs_pair=True)
    p = add("weight", _cmd_weight, needs_pair=True)
    p.add_argument("subspace", help="path to a subspace JSON file")
    add("filtration", _cmd_filtration, needs_pair=True)
    add("exceptional", _cmd_exceptional, needs_pair=True)
    add("special-t", _cmd_special_t, needs_pair=True)
    add(
        "infima",
        _cmd_infima,
        needs_pair=True,
        q={"required": True},
        box={"type": int, "default": None},
    )
    add(
        "slopes",
        _cmd_slopes,
        needs_pair=True,
        qgrid={"required": True},
        box={"type": int, "default": None},
    )
    add(
        "minkowski",
        _cmd_minkowski,
        needs_pair=True,
        q={"required": True},
        box={"type": int, "default": None},
    )
    add(
        "gap",
        _cmd_gap,
        needs_pair=True,
        delta={"required": True},
        a={"required": True},
        box={"type": int, "default": 10},
    )
    add(
        "scan",
        _cmd_scan,
        needs_system=True,
        hmax={"required": True},
        box={"type": int, "default": 10},
    )
    add(
        "bounds",
        _cmd_bounds,
        thm={"required": True},
        n={"type": int},
        delta={},
        eps={},
        R={},
        D={},
        dd={"type": int},
        s={"type": int},
        hl={},
        hstar={},
    )
    add("reduce", _cmd_reduce, needs_system=True)
    add("cover", _cmd_cover, omega={"required": True}, delta={"required": True}, q1={"default": None})
    return parser


def _cmd_validate(args) -> int:
    pair = _load_pair(args.pair)
    rep = validate(pair)
    _emit(
        {
            "core_ok": rep.core_ok,
            "normalized_ok": rep.normalized_ok,
            "r": rep.r,
            "messages": rep.messages,
        },
        args.out,
    )
    return 0 if rep.core_ok else 2


def _cmd_invariants(args) -> int:
    pair = _load_pair(args.pair)
    delta_l, h_l = pair_invariants(pair)
    _emit(
        {
            "delta_L": _factored_json(delta_l, args.precision),
            "H_L": _factored_json(h_l, args.precision),
            "r": validate(pair).r,
            "theta": frac_str(theta_of(pair)),
            "alpha": frac_str(alpha_of(pair)),
        },
        args.out,
    )
    return 0


def _cmd_weight(args) -> int:
    pair = _load_pair(args.pair)
    sub = _subspace_from_json(_load_json(args.subspace))
    _emit({"weight": frac_str(weight(pair, sub)), "dim": sub.dim}, args.out)
    return 0


def _cmd_filtration(args) -> int:
    pair = _load_pair(args.pair)
    _emit(_filtration_json(pair), args.out)
    return 0


def _cmd_exceptional(args) -> int:
    pair = _load_pair(args.pair)
    from .exterior_algebra import Subspace
    from .filtration import WeightedSubspace, slope, weight as w_of

    t = exceptional_subspace(pair)
    full = Subspace.full(pair.n)
    ws = WeightedSubspace(t, w_of(pair, t), slope(pair, full, t))
    out = _subspace_json(ws.space)
    out["weight"] = frac_str(ws.weight)
    out["slope_vs_full"] = frac_str(ws.slope_vs)
    _emit(out, args.out)
    return 0


def _cmd_special_t(args) -> int:
    pair = _load_pair(args.pair)
    partition = special_case_T(pair)
    _emit({"partition": [list(block) for block in partition]}, args.out)
    return 0


def _cmd_infima(args) -> int:
    pair = _load_pair(args.pair)
    q = parse_frac(args.q)
    box = args.box
    if box is None:
        from .infima_lab import default_box_policy

        box = default_box_policy(pair)(q)
    est = successive_infima(pair, q, box)
    _emit(_infima_json(est, args.precision), args.out)
    return 0


def _cmd_slopes(args) -> int:
    pair = _load_pair(args.pair)
    qs = _parse_qgrid(args.qgrid)
    policy = None
    if args.box is not None:
        policy = lambda q: args.box
    rep = slope_profile(pair, qs, policy)
    if args.out and args.out.endswith(".csv"):
        _emit(slope_csv(rep), args.out, as_csv=True)
        return 0
    _emit(
        {
            "qs": [frac_str(q) for q in rep.qs],
            "rows": [
                {"q": frac_str(q), "i": i, "log10_lambda": f"{ll:.12f}", "slope": f"{s:.12f}"}
                for q, i, ll, s in rep.rows
            ],
            "expected_slopes": [f"{e:.12f}" for e in rep.expected],
            "span_matches": {frac_str(q): ok for q, ok in rep.span_matches.items()},
        },
        args.out,
    )
    return 0


def _cmd_minkowski(args) -> int:
    pair = _load_pair(args.pair)
    box = args.box
    if box is None:
        from .infima_lab import default_box_policy

        box = default_box_policy(pair)(parse_frac(args.q))
    rep = minkowski_check(pair, parse_frac(args.q), box)
    _emit(
        {
            "q": frac_str(rep.q),
            "box": rep.box,
            "product": _factored_json(rep.product, args.precision),
            "lower": _factored_json(rep.lower, args.precision),
            "upper": _factored_json(rep.upper, args.precision),
            "lower_ok": rep.lower_ok,
            "upper_ok": rep.upper_ok,
        },
        args.out,
    )
    return 0


def _cmd_gap(args) -> int:
    pair = _load_pair(args.pair)
    rep = gap_experiment(pair, parse_frac(args.delta), parse_frac(args.a), args.box)
    _emit(
        {
            "a": frac_str(rep.a),
            "delta": frac_str(rep.delta),
            "box": rep.box,
            "threshold": _factored_json(rep.threshold, args.precision),
            "solutions": [list(x) for x in rep.solutions],
            "span": _subspace_json(rep.span),
            "proper": rep.proper,
        },
        args.out,
    )
    return 0


def _cmd_scan(args) -> int:
    sys_inst = _load_system(args.system)
    rep = scan_system(sys_inst, parse_frac(args.hmax), args.box)
    _emit(
        {
            "solutions": [
                {"x": list(s["x"]), "height": s["height"], "in_T_prime": s["in_T_prime"]}
                for s in rep.solutions
            ],
            "T_prime": _subspace_json(rep.t_prime),
            "reduced_delta": frac_str(rep.reduced_delta),
            "bin_ratio": frac_str(rep.bin_ratio),
            "histogram": {str(k): v for k, v in sorted(rep.histogram.items())},
        },
        args.out,
    )
    return 0


def _cmd_bounds(args) -> int:
    # degree-like inputs and heights default to 1 for plain rational data
    params = {
        "n": args.n,
        "delta": parse_frac(args.delta) if args.delta else None,
        "eps": parse_frac(args.eps) if args.eps else None,
        "R": parse_frac(args.R) if args.R else None,
        "D": parse_frac(args.D) if args.D else Fraction(1),
        "d": args.dd if args.dd else 1,
        "s": args.s if args.s else 1,
        "H_L": parse_frac(args.hl) if args.hl else Fraction(1),
        "H_star": parse_frac(args.hstar) if args.hstar else Fraction(1),
    }
    rep = bound_constants(args.thm, params, precision=args.precision)
    _emit(rep.to_json(), args.out)
    return 0


def _cmd_reduce(args) -> int:
    sys_inst = _load_system(args.system)
    pair, delta, qexp = reduce_system(sys_inst)
    _emit(
        {
            "pair": pair_to_json(pair),
            "delta": frac_str(delta),
            "q_exponent": frac_str(qexp),
        },
        args.out,
    )
    return 0


def _cmd_cover(args) -> int:
    omega = parse_frac(args.omega)
    delta = parse_frac(args.delta)
    s = interval_cover(omega, delta)
    out = {"s": s}
    if args.q1 is not None:
        out["endpoints_log10"] = [f"{e:.12f}" for e in cover_list(parse_frac(args.q1), omega, delta)]
    _emit(out, args.out)
    return 0


def main(argv=None) -> int:
    return cmd_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
