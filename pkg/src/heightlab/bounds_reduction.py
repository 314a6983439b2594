"""Explicit theorem constants, interval covers, and the system reduction.

All closed-form constants are evaluated with outward-rounded interval
arithmetic at escalating precision: floor brackets are only taken once
the enclosure pins the integer, and reported decimals carry certified
significant digits.  "log" in the formulas is the natural logarithm
throughout (recorded in every report).
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exact_reals import FactoredReal
from .twisted_system import PlaceData, TwistedPair, ValidationError, pair_invariants, twisted_height, validate

__all__ = [
    "BoundReport",
    "bound_constants",
    "THEOREMS",
    "interval_cover",
    "cover_list",
    "s1_count",
    "s1_bound",
    "s2_count",
    "gamma_value",
    "merge_intervals",
    "reduce_system",
    "reduction_inequality_holds",
    "internal_t0_consistency",
]


# -- interval plumbing ------------------------------------------------------


@contextmanager
def _ivdps(dps: int):
    iv = mpmath.iv
    old = iv.dps
    iv.dps = dps
    try:
        yield iv
    finally:
        iv.dps = old


def _endpoints(x) -> tuple[Fraction, Fraction]:
    lo, hi = x._mpi_
    out = []
    for sign, man, exp, _ in (lo, hi):
        f = Fraction(int(man)) * Fraction(2) ** int(exp)
        out.append(-f if sign else f)
    return out[0], out[1]


def _iv_fr(iv, x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _iv_ln(iv, x):
    """Natural log of a positive Fraction or FactoredReal, as an interval."""
    if isinstance(x, FactoredReal):
        total = iv.mpf(0)
        for p, e in sorted(x.factors.items()):
            total = total + iv.log(p) * _iv_fr(iv, e)
        return total
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of non-positive value")
    return iv.log(iv.mpf(x.numerator)) - iv.log(iv.mpf(x.denominator))


def _certified_floor(build, dps: int = 30) -> int:
    while dps <= 20_000:
        with _ivdps(dps) as iv:
            lo, hi = _endpoints(build(iv))
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        dps *= 2
    raise RuntimeError("floor bracket straddles an integer at max precision")


def _certified_decimal(build, sig: int, dps: int = 30) -> str:
    """Decimal string of a positive-width target with sig certified digits."""
    while dps <= 20_000:
        with _ivdps(dps) as iv:
            lo, hi = _endpoints(build(iv))
        mid = (lo + hi) / 2
        width = hi - lo
        scale = max(abs(lo), abs(hi))
        if scale == 0:
            return "0"
        if width / scale <= Fraction(1, 10 ** (sig + 2)):
            with mpmath.workdps(sig + 10):
                v = mpmath.mpf(mid.numerator) / mpmath.mpf(mid.denominator)
                return mpmath.nstr(v, sig)
        dps *= 2
    raise RuntimeError("failed to certify decimal digits")


# -- the constant calculator -------------------------------------------------


@dataclass
class BoundReport:
    """Constants of one theorem, with a representation tier per entry."""

    theorem: str
    inputs: dict
    constants: dict = field(default_factory=dict)
    log_convention: str = "ln"

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "log_convention": self.log_convention,
            "inputs": {k: str(v) for k, v in self.inputs.items()},
            "constants": self.constants,
        }

    def log10_float(self, name: str) -> float:
        entry = self.constants[name]
        if entry.get("log10") is not None:
            return float(entry["log10"])
        if entry.get("value") is not None:
            return math.log10(float(Fraction(entry["value"])))
        raise KeyError(name)


def _as_height(x) -> FactoredReal:
    if isinstance(x, FactoredReal):
        return x
    return FactoredReal.from_rational(Fraction(x))


def _entry_int(m: int) -> dict:
    return {"tier": "exact", "value": str(m), "log10": None, "loglog10": None}


def _entry_factored(x: FactoredReal, sig: int) -> dict:
    log10 = _certified_decimal(lambda iv: _iv_ln(iv, x) / iv.log(10), sig) if not x.is_one() else "0"
    return {"tier": "exact", "value": None, "factored": x.to_json(), "log10": log10, "loglog10": None}


def _entry_real(build, sig: int) -> dict:
    log10 = _certified_decimal(lambda iv: iv.log(build(iv)) / iv.log(10), sig)
    return {"tier": "log10", "value": None, "log10": log10, "loglog10": None}


def _entry_loglog(build_log10log10, sig: int) -> dict:
    s = _certified_decimal(build_log10log10, sig)
    return {"tier": "loglog10", "value": None, "log10": None, "loglog10": s}


def _need(params, names):
    missing = [k for k in names if params.get(k) is None]
    if missing:
        raise ValidationError(f"missing parameters: {', '.join(missing)}")


def _check_common(n=None, delta=None, eps=None, R=None, D=None, d=None, s=None):
    if n is not None and (not isinstance(n, int) or n < 2):
        raise ValidationError("n must be an integer >= 2")
    if delta is not None and not 0 < delta <= 1:
        raise ValidationError("delta must satisfy 0 < delta <= 1")
    if eps is not None and not 0 < eps <= 1:
        raise ValidationError("epsilon must satisfy 0 < epsilon <= 1")
    if R is not None and n is not None and R < n:
        raise ValidationError("R must be >= r >= n")
    if D is not None and D < 1:
        raise ValidationError("D must be >= 1")
    if d is not None and (not isinstance(d, int) or d < 1):
        raise ValidationError("d must be an integer >= 1")
    if s is not None and (not isinstance(s, int) or s < 1):
        raise ValidationError("s must be an integer >= 1")


def bound_constants(theorem: str, params: dict, precision: int = 12) -> BoundReport:
    """Evaluate every named constant of the given theorem.

    Recognized ids: 1.1, 1.2, 1.3, 2.1, 2.2, 2.3, 3.1, 3.1b, 3.2, 8.1.
    Parameters (n, delta/eps as Fractions, R, D, d, s, H_L, H_star) are
    validated against the theorem's ranges.
    """
    theorem = str(theorem)
    if theorem not in THEOREMS:
        raise ValidationError(f"unknown theorem id {theorem!r}")
    return THEOREMS[theorem](params, precision)


def _two_pow_2n(iv, n):
    return iv.mpf(2) ** (2 * n)


def _thm_1_1(params, sig):
    _need(params, ["n", "delta"])
    n, delta = int(params["n"]), Fraction(params["delta"])
    _check_common(n=n, delta=delta)

    def t3(iv):
        core = iv.mpf(10) ** 6 * _two_pow_2n(iv, n) * iv.mpf(n) ** 10
        core = core * _iv_fr(iv, delta) ** -3
        return core * iv.log(_iv_fr(iv, Fraction(6 * n) / delta)) ** 2

    q0 = FactoredReal.from_rational(n) ** (1 / delta)
    rep = BoundReport("1.1", {"n": n, "delta": delta})
    rep.constants["t3"] = _entry_real(t3, sig)
    rep.constants["Q0"] = _entry_factored(q0, sig)
    return rep


def _thm_1_2(params, sig):
    _need(params, ["n", "delta"])
    n, delta = int(params["n"]), Fraction(params["delta"])
    _check_common(n=n, delta=delta)

    def m_val(iv):
        core = iv.mpf(10) ** 5 * _two_pow_2n(iv, n) * iv.mpf(n) ** 10
        core = core * _iv_fr(iv, delta) ** -2
        return core * iv.log(_iv_fr(iv, Fraction(6 * n) / delta))

    m = _certified_floor(m_val)

    def omega(iv):
        return _iv_fr(iv, 1 / delta) * iv.log(6 * n)

    rep = BoundReport("1.2", {"n": n, "delta": delta})
    rep.constants["m"] = _entry_int(m)
    rep.constants["omega"] = _entry_real(omega, sig)
    rep.constants["Q0"] = _entry_factored(FactoredReal.from_rational(n) ** (1 / delta), sig)
    return rep


def _cor_1_3(params, sig):
    _need(params, ["n", "eps"])
    n, eps = int(params["n"]), Fraction(params["eps"])
    _check_common(n=n, eps=eps)

    def m_val(iv):
        core = iv.mpf(10) ** 6 * _two_pow_2n(iv, n) * iv.mpf(n) ** 12
        core = core * _iv_fr(iv, eps) ** -2
        return core * iv.log(_iv_fr(iv, Fraction(6 * n) / eps))

    m = _certified_floor(m_val)

    def omega(iv):
        return _iv_fr(iv, 2 * n / eps) * iv.log(6 * n)

    rep = BoundReport("1.3", {"n": n, "eps": eps})
    rep.constants["m_prime"] = _entry_int(m)
    rep.constants["omega_prime"] = _entry_real(omega, sig)
    rep.constants["H0"] = _entry_factored(FactoredReal.from_rational(n) ** (Fraction(n) / eps), sig)
    return rep


def _c0_of(n, delta, R, h_l) -> FactoredReal:
    a = _as_height(h_l) ** (1 / Fraction(R))
    b = FactoredReal.from_rational(n) ** (1 / delta)
    return a if a > b else b


def _thm_2_1(params, sig):
    _need(params, ["n", "delta", "R", "H_L"])
    n, delta, R = int(params["n"]), Fraction(params["delta"]), Fraction(params["R"])
    _check_common(n=n, delta=delta, R=R)
    h_l = _as_height(params["H_L"])

    def t0(iv):
        core = iv.mpf(10) ** 6 * _two_pow_2n(iv, n) * iv.mpf(n) ** 10
        core = core * _iv_fr(iv, delta) ** -3
        core = core * iv.log(_iv_fr(iv, 3 * R / delta))
        return core * iv.log(_iv_fr(iv, 1 / delta) * iv.log(_iv_fr(iv, 3 * R)))

    rep = BoundReport("2.1", {"n": n, "delta": delta, "R": R, "H_L": params["H_L"]})
    rep.constants["t0"] = _entry_real(t0, sig)
    rep.constants["C0"] = _entry_factored(_c0_of(n, delta, R, h_l), sig)
    return rep


def _thm_2_2(params, sig):
    _need(params, ["n", "delta", "R", "H_L", "d"])
    n, delta, R, d = int(params["n"]), Fraction(params["delta"]), Fraction(params["R"]), int(params["d"])
    _check_common(n=n, delta=delta, R=R, d=d)
    h_l = _as_height(params["H_L"])

    def t1(iv):
        big = iv.mpf(90 * n) ** (n * d)
        inner = iv.log(3) + _iv_ln(iv, h_l) / _iv_fr(iv, R)
        return _iv_fr(iv, 1 / delta) * (big + 3 * iv.log(inner))

    rep = BoundReport("2.2", {"n": n, "delta": delta, "R": R, "d": d, "H_L": params["H_L"]})
    rep.constants["t1"] = _entry_real(t1, sig)
    rep.constants["C0"] = _entry_factored(_c0_of(n, delta, R, h_l), sig)
    return rep


def _thm_2_3(params, sig):
    _need(params, ["n", "delta", "R", "H_L"])
    n, delta, R = int(params["n"]), Fraction(params["delta"]), Fraction(params["R"])
    _check_common(n=n, delta=delta, R=R)
    h_l = _as_height(params["H_L"])

    def m0(iv):
        core = iv.mpf(10) ** 5 * _two_pow_2n(iv, n) * iv.mpf(n) ** 10
        core = core * _iv_fr(iv, delta) ** -2
        return core * iv.log(_iv_fr(iv, 3 * R / delta))

    def omega0(iv):
        return _iv_fr(iv, 1 / delta) * iv.log(_iv_fr(iv, 3 * R))

    rep = BoundReport("2.3", {"n": n, "delta": delta, "R": R, "H_L": params["H_L"]})
    rep.constants["m0"] = _entry_int(_certified_floor(m0))
    rep.constants["omega0"] = _entry_real(omega0, sig)
    rep.constants["C0"] = _entry_factored(_c0_of(n, delta, R, h_l), sig)
    return rep


def _c1_of(n, eps, R, D, h_star) -> FactoredReal:
    a = _as_height(h_star) ** (1 / (3 * Fraction(R) * Fraction(D)))
    b = FactoredReal.from_rational(n) ** (Fraction(n) / eps)
    return a if a > b else b


def _thm_3_1(params, sig):
    _need(params, ["n", "eps", "R", "D", "H_star"])
    n, eps, R, D = int(params["n"]), Fraction(params["eps"]), Fraction(params["R"]), Fraction(params["D"])
    _check_common(n=n, eps=eps, D=D)
    h_star = _as_height(params["H_star"])

    def t(iv):
        core = iv.mpf(10) ** 9 * _two_pow_2n(iv, n) * iv.mpf(n) ** 14
        core = core * _iv_fr(iv, eps) ** -3
        core = core * iv.log(_iv_fr(iv, 3 * R * D / eps))
        return core * iv.log(_iv_fr(iv, 1 / eps) * iv.log(_iv_fr(iv, 3 * R * D)))

    rep = BoundReport("3.1", {"n": n, "eps": eps, "R": R, "D": D, "H_star": params["H_star"]})
    rep.constants["t"] = _entry_real(t, sig)
    rep.constants["C1"] = _entry_factored(_c1_of(n, eps, R, D, h_star), sig)
    return rep


def _cor_3_1b(params, sig):
    _need(params, ["n", "eps", "D", "s"])
    n, eps, D, s = int(params["n"]), Fraction(params["eps"]), Fraction(params["D"]), int(params["s"])
    _check_common(n=n, eps=eps, D=D, s=s)

    def t(iv):
        head = (_iv_fr(iv, 9 * n * n / eps)) ** (n * s)
        core = iv.mpf(10) ** 10 * _two_pow_2n(iv, n) * iv.mpf(n) ** 15
        core = core * _iv_fr(iv, eps) ** -3
        core = core * iv.log(_iv_fr(iv, 3 * D / eps))
        return head * core * iv.log(_iv_fr(iv, 1 / eps) * iv.log(_iv_fr(iv, 3 * D)))

    rep = BoundReport("3.1b", {"n": n, "eps": eps, "D": D, "s": s})
    rep.constants["t"] = _entry_real(t, sig)
    return rep


def _thm_3_2(params, sig):
    _need(params, ["n", "eps", "R", "D", "H_star"])
    n, eps, R, D = int(params["n"]), Fraction(params["eps"]), Fraction(params["R"]), Fraction(params["D"])
    _check_common(n=n, eps=eps, D=D)
    h_star = _as_height(params["H_star"])

    def m1(iv):
        core = iv.mpf(10) ** 8 * _two_pow_2n(iv, n) * iv.mpf(n) ** 14
        core = core * _iv_fr(iv, eps) ** -2
        return core * iv.log(_iv_fr(iv, 3 * R * D / eps))

    def omega1(iv):
        return _iv_fr(iv, 3 * n / eps) * iv.log(_iv_fr(iv, 3 * R * D))

    rep = BoundReport("3.2", {"n": n, "eps": eps, "R": R, "D": D, "H_star": params["H_star"]})
    rep.constants["m1"] = _entry_int(_certified_floor(m1))
    rep.constants["omega1"] = _entry_real(omega1, sig)
    rep.constants["C1"] = _entry_factored(_c1_of(n, eps, R, D, h_star), sig)
    return rep


def _thm_8_1(params, sig):
    _need(params, ["n", "delta", "R", "H_L"])
    n, delta, R = int(params["n"]), Fraction(params["delta"]), Fraction(params["R"])
    _check_common(n=n, delta=delta, R=R)
    h_l = _as_height(params["H_L"])
    if FactoredReal.from_rational(2) * h_l <= FactoredReal.one():
        raise ValidationError("H_L must be >= 1")

    def m2_val(iv):
        core = iv.mpf(61) * iv.mpf(n) ** 6 * _two_pow_2n(iv, n)
        core = core * _iv_fr(iv, delta) ** -2
        return core * iv.log(_iv_fr(iv, 22 * n * n * 2 ** n * R / delta))

    m2 = _certified_floor(m2_val)
    omega2 = FactoredReal.from_rational(m2) ** Fraction(5, 2)

    def loglog_c2(iv):
        # log10 log10 C2 = 2 m2 log10 m2 + log10 log10 (2 H_L)
        l10 = iv.log(10)
        log10_2h = (iv.log(2) + _iv_ln(iv, h_l)) / l10
        return 2 * m2 * iv.log(m2) / l10 + iv.log(log10_2h) / l10

    rep = BoundReport("8.1", {"n": n, "delta": delta, "R": R, "H_L": params["H_L"]})
    rep.constants["m2"] = _entry_int(m2)
    rep.constants["omega2"] = _entry_factored(omega2, sig)
    rep.constants["C2"] = _entry_loglog(loglog_c2, sig)
    return rep


THEOREMS = {
    "1.1": _thm_1_1,
    "1.2": _thm_1_2,
    "1.3": _cor_1_3,
    "2.1": _thm_2_1,
    "2.2": _thm_2_2,
    "2.3": _thm_2_3,
    "3.1": _thm_3_1,
    "3.1b": _cor_3_1b,
    "3.2": _thm_3_2,
    "8.1": _thm_8_1,
}


def internal_t0_consistency(n: int, R, delta) -> bool:
    """Certified check that the t0 bound dominates 1 + 3 m0 (1+ln w0)/delta."""
    delta = Fraction(delta)
    R = Fraction(R)
    m0 = bound_constants("2.3", {"n": n, "delta": delta, "R": R, "H_L": 1})
    m0_int = int(m0.constants["m0"]["value"])

    def lhs(iv):
        core = iv.mpf(10) ** 6 * _two_pow_2n(iv, n) * iv.mpf(n) ** 10
        core = core * _iv_fr(iv, delta) ** -3
        core = core * iv.log(_iv_fr(iv, 3 * R / delta))
        return core * iv.log(_iv_fr(iv, 1 / delta) * iv.log(_iv_fr(iv, 3 * R)))

    def rhs(iv):
        omega0 = _iv_fr(iv, 1 / delta) * iv.log(_iv_fr(iv, 3 * R))
        return 1 + 3 * _iv_fr(iv, 1 / delta) * m0_int * (1 + iv.log(omega0))

    dps = 30
    while dps <= 2000:
        with _ivdps(dps) as iv:
            llo, _ = _endpoints(lhs(iv))
            _, rhi = _endpoints(rhs(iv))
        if llo >= rhi:
            return True
        with _ivdps(dps) as iv:
            _, lhi = _endpoints(lhs(iv))
            rlo, _ = _endpoints(rhs(iv))
        if lhi < rlo:
            return False
        dps *= 2
    raise RuntimeError("consistency comparison did not resolve")


# -- interval covers ---------------------------------------------------------


def interval_cover(omega, delta) -> int:
    """Minimal s with (1+delta/2)^s >= omega, for omega > 1, exact."""
    omega = Fraction(omega)
    delta = Fraction(delta)
    if omega <= 1:
        raise ValueError("omega must be > 1")
    if not 0 < delta <= 1:
        raise ValueError("delta must be in (0, 1]")
    base = 1 + delta / 2
    s = 0
    power = Fraction(1)
    while power < omega:
        power *= base
        s += 1
    return s


def cover_list(q1, omega, delta) -> list[float]:
    """log10 endpoints of the subintervals [Q1^(1+d/2)^k], k = 0..s."""
    q1 = Fraction(q1)
    if q1 <= 1:
        raise ValueError("Q1 must be > 1")
    s = interval_cover(omega, delta)
    base = 1 + Fraction(delta) / 2
    logq = math.log10(float(q1))
    return [float(base ** k) * logq for k in range(s + 1)]


def _min_power_at_least(base: Fraction, target_builder, dps: int = 30) -> int:
    """Minimal s >= 1 with base**s >= target, target given as an interval.

    base is an exact rational > 1; comparisons escalate precision when an
    enclosure straddles the boundary (impossible for irrational targets).
    """
    s = 1
    while True:
        power = base ** s
        cur = dps
        while True:
            with _ivdps(cur) as iv:
                lo, hi = _endpoints(target_builder(iv))
            if power >= hi:
                return s
            if power < lo:
                break
            cur *= 2
            if cur > 20_000:
                raise RuntimeError("power comparison straddles the boundary")
        s += 1
        if s > 10_000:
            raise RuntimeError("cover count did not converge")


def s1_count(n: int, delta, R, h_l) -> int:
    """Number of cover intervals for Q in [n^(1/delta), C0).

    The count is the minimal s with (1+delta/2)^s >= delta ln C0 / ln n.
    """
    delta = Fraction(delta)
    R = Fraction(R)
    c0 = _c0_of(n, delta, R, _as_height(h_l))
    n_pow = FactoredReal.from_rational(n) ** (1 / delta)
    if not c0 > n_pow:
        return 1  # the window [n^(1/delta), C0) is empty

    def target(iv):
        return _iv_fr(iv, delta) * _iv_ln(iv, c0) / iv.log(n)

    return _min_power_at_least(1 + delta / 2, target)


def s1_bound(n: int, delta, R, h_l) -> float:
    """The closed-form cap 2 + 3 delta^{-1} ln ln (3 H_L^{1/R})."""
    delta = Fraction(delta)
    with _ivdps(40) as iv:
        inner = iv.log(3) + _iv_ln(iv, _as_height(h_l)) / _iv_fr(iv, Fraction(R))
        val = 2 + 3 * _iv_fr(iv, 1 / delta) * iv.log(inner)
        lo, hi = _endpoints(val)
    return float((lo + hi) / 2)


def s2_count(n: int, delta) -> int:
    """Number of dyadic cover intervals for Q in [1, n^(1/delta)).

    Minimal s with (1+delta/2)^s >= log(2 sqrt(n))/log 2; exact rational
    arithmetic when n is a power of two, certified intervals otherwise.
    """
    delta = Fraction(delta)
    base = 1 + delta / 2
    m = n.bit_length() - 1
    if n == 1 << m:
        target = 1 + Fraction(m, 2)
        s = 1
        power = base
        while power < target:
            power *= base
            s += 1
        return s

    def target_iv(iv):
        return iv.log(2 * iv.sqrt(n)) / iv.log(2)

    return _min_power_at_least(base, target_iv)


def gamma_value(k: int, delta) -> Fraction:
    """gamma_k = ((1+delta/2)^k - 1)/(delta/2), exact."""
    delta = Fraction(delta)
    return ((1 + delta / 2) ** k - 1) / (delta / 2)


def merge_intervals(a_list, omega, b0, omega_prime, m_prime) -> list[Fraction]:
    """Re-cover a union of intervals by at most m' wider ones.

    Works on log10 endpoints: the input union is [0, a_1) joined with
    [a_h, omega*a_h); the output intervals are [b_j, omega'*b_j).  Uses
    the constructive choice: b_1 is the smallest point of the input set S
    at or after b0, each later b_j the smallest point of S not yet
    covered.  Verifies the containment before returning.
    """
    a = [Fraction(x) for x in a_list]
    omega = Fraction(omega)
    omega_p = Fraction(omega_prime)
    b0 = Fraction(b0)
    if not a or any(x >= y for x, y in zip(a, a[1:])):
        raise ValueError("A endpoints must be strictly increasing and non-empty")
    if a[0] < 0 or b0 < 0:
        raise ValueError("endpoints must correspond to values >= 1")
    if not omega > 1 or omega_p < omega:
        raise ValueError("need omega' >= omega > 1")
    if m_prime < len(a):
        raise ValueError("need m' >= m")

    comps: list[list[Fraction]] = []
    for x in a:
        lo, hi = x, x * omega
        if comps and lo <= comps[-1][1]:
            comps[-1][1] = max(comps[-1][1], hi)
        else:
            comps.append([lo, hi])
    comps = [c for c in comps if c[1] > c[0]]
    tail = a[-1] * omega  # S continues as [tail, inf)

    def next_in_s(x: Fraction) -> Fraction:
        if x >= tail:
            return x
        for lo, hi in comps:
            if x < lo:
                return lo
            if lo <= x < hi:
                return x
        return tail

    bs: list[Fraction] = []
    cursor = b0
    while not _covered(comps, b0, bs, omega_p):
        if len(bs) >= m_prime:
            raise RuntimeError("failed to cover the input union within m' intervals")
        start = next_in_s(cursor)
        bs.append(start)
        cursor = start * omega_p
    return bs


def _covered(comps, b0, bs, omega_p) -> bool:
    """Is every input component inside [0,b0) plus the chosen intervals?"""
    out = [(Fraction(0), b0)] + [(b, b * omega_p) for b in bs]
    out.sort()
    merged = []
    for lo, hi in out:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    for lo, hi in comps:
        ok = any(mlo <= lo and hi <= mhi for mlo, mhi in merged)
        if not ok:
            return False
    return True


# -- reduction from Diophantine systems --------------------------------------


def reduce_system(sys) -> tuple[TwistedPair, Fraction, Fraction]:
    """Build the twisted pair of a system: centered exponents, same forms.

    Returns (pair, delta, q_exponent) with delta = eps/(n+eps) and the
    map H -> H^q_exponent, q_exponent = 1 + eps/n.  The output pair is
    always fully normalized.
    """
    n = sys.n
    eps = sys.epsilon
    active = {}
    for v, pd in sys.places.items():
        mean = sum(pd.exps, Fraction(0)) / n
        c = tuple(Fraction(n, n + eps) * (d - mean) for d in pd.exps)
        active[v] = PlaceData(pd.forms, c)
    pair = TwistedPair(n, active).without_neutral_places()
    rep = validate(pair)
    if not rep.normalized_ok:
        raise ValidationError("reduced pair failed normalization (internal)")
    return pair, eps / (n + eps), 1 + eps / Fraction(n)


def reduction_inequality_holds(pair: TwistedPair, delta, q_exponent, x) -> bool:
    """H_{L,c,Q}(x) <= Delta^{1/n} Q^{-delta} with Q = H(x)^{q_exponent}."""
    from .places_heights import height

    h = height(x)
    q = h ** Fraction(q_exponent)  # H(x) >= 1, so Q >= 1
    lhs = twisted_height(pair, q, x)
    dl, _ = pair_invariants(pair)
    rhs = dl ** Fraction(1, pair.n) * q ** (-Fraction(delta))
    return lhs <= rhs
