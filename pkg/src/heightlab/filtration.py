"""Weights, the exceptional subspace, slope filtrations and derived pairs.

The weight of a subspace U at a place is the minimal exponent sum over
index sets whose restricted forms stay independent on U; after sorting
the exponents ascending a greedy matroid scan computes it exactly.  The
exceptional subspace minimizes the slope (w(V)-w(U))/(dim V - dim U),
ties broken by minimal dimension; iterating this through restricted
pairs yields the Newton-polygon filtration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exterior_algebra import Subspace, wedge
from .rational_linalg import mat_mul, rank, solve_exact
from .twisted_system import PlaceData, TwistedPair, ValidationError

__all__ = [
    "UnsupportedSystemError",
    "weight",
    "local_weight",
    "local_weight_via_flags",
    "index_set",
    "flag_subspaces",
    "slope",
    "exceptional_subspace",
    "candidate_subspaces",
    "FiltrationChain",
    "filtration",
    "special_case_T",
    "restrict_pair",
    "embed_through",
    "quotient_pair",
    "quotient_projection",
    "quotient_preimage",
    "exterior_pair",
    "WeightedSubspace",
]


class UnsupportedSystemError(Exception):
    """The operation's structural precondition on the system fails."""


@dataclass(frozen=True)
class WeightedSubspace:
    space: Subspace
    weight: Fraction
    slope_vs: Fraction | None = None


def _sorted_forms(pd: PlaceData):
    """(form, exponent) pairs sorted by ascending exponent, stable."""
    order = sorted(range(len(pd.exps)), key=lambda i: (pd.exps[i], i))
    return [(pd.forms[i], pd.exps[i]) for i in order]


def _restriction(form, basis_rows):
    """L restricted to span(basis_rows), as the tuple (L(b_1),...,L(b_k))."""
    return tuple(sum(a * b for a, b in zip(form, row)) for row in basis_rows)


class _RankTracker:
    """Incremental rank of a growing set of rational vectors."""

    def __init__(self):
        self.rows = []  # echelonized

    def try_add(self, vec) -> bool:
        v = list(vec)
        for row in self.rows:
            piv = next(i for i, x in enumerate(row) if x != 0)
            if v[piv] != 0:
                f = v[piv] / row[piv]
                v = [a - f * b for a, b in zip(v, row)]
        if all(x == 0 for x in v):
            return False
        self.rows.append(v)
        return True


def _greedy_selection(pd: PlaceData, basis_rows):
    """Greedy index scan at one place for U = span(basis_rows).

    Returns (weight, positions) where positions are 1-based indices into
    the exponent-sorted order of the place's forms.
    """
    k = len(basis_rows)
    if k == 0:
        return Fraction(0), ()
    tracker = _RankTracker()
    total = Fraction(0)
    positions = []
    for pos, (form, c) in enumerate(_sorted_forms(pd), start=1):
        if tracker.try_add(_restriction(form, basis_rows)):
            total += c
            positions.append(pos)
            if len(positions) == k:
                break
    if len(positions) != k:
        raise ValidationError("forms do not span the dual of U (dependent system)")
    return total, tuple(positions)


def local_weight(pair: TwistedPair, u: Subspace, v) -> Fraction:
    """w_v(U): minimal exponent sum over independent restrictions."""
    return _greedy_selection(pair.place_data(v), u.rows)[0]


def index_set(pair: TwistedPair, u: Subspace, v) -> tuple[int, ...]:
    """The greedy index set I_v(U), as positions in the sorted order."""
    return _greedy_selection(pair.place_data(v), u.rows)[1]


def weight(pair: TwistedPair, u: Subspace) -> Fraction:
    """w(U) = sum_v w_v(U); only active places contribute."""
    if u.n != pair.n:
        raise ValueError("ambient dimension mismatch")
    return sum((local_weight(pair, u, v) for v in pair.active), Fraction(0))


def flag_subspaces(pair: TwistedPair, v) -> list[Subspace]:
    """Kernels of the sorted form prefixes at v; dims n, n-1, ..., 0."""
    n = pair.n
    forms = [f for f, _ in _sorted_forms(pair.place_data(v))]
    out = [Subspace.full(n)]
    for i in range(1, n + 1):
        out.append(Subspace.kernel(n, forms[:i]))
    return out


def local_weight_via_flags(pair: TwistedPair, u: Subspace, v) -> Fraction:
    """w_v(U) from flag-intersection dimensions (independent route)."""
    sorted_fc = _sorted_forms(pair.place_data(v))
    flags = flag_subspaces(pair, v)
    dims = [u.intersect(f).dim for f in flags]
    total = Fraction(0)
    for i in range(1, pair.n + 1):
        c = sorted_fc[i - 1][1]
        total += c * (dims[i - 1] - dims[i])
    return total


def slope(pair: TwistedPair, upper: Subspace, lower: Subspace) -> Fraction:
    """mu(U2, U1) = (w(U2) - w(U1)) / (dim U2 - dim U1)."""
    dd = upper.dim - lower.dim
    if dd <= 0:
        raise ValueError("need dim upper > dim lower")
    return Fraction(weight(pair, upper) - weight(pair, lower), 1) / dd


def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield [[first]] + part


def _is_special_shaped(pair: TwistedPair) -> bool:
    n = pair.n
    ones = tuple(Fraction(1) for _ in range(n))
    allowed = {tuple(Fraction(i == j) for j in range(n)) for i in range(n)}
    allowed.add(ones)
    return all(f in allowed for pd in pair.active.values() for f in pd.forms)


def _partition_families(n: int):
    """All families of pairwise disjoint non-empty subsets of {1..n}."""
    for size in range(1, n + 1):
        for support in combinations(range(n), size):
            for part in _set_partitions(support):
                yield tuple(sorted((frozenset(b) for b in part), key=lambda b: min(b)))


def _partition_subspace(n: int, family) -> Subspace:
    rows = [[Fraction(1 if j in block else 0) for j in range(n)] for block in family]
    return Subspace.kernel(n, rows)


def _semilattice_closure(generators, op, cap: int) -> list[Subspace]:
    """Closure of the generators under one associative idempotent op.

    Combining existing elements with generators only already yields every
    op-combination of generator subsets, and stays finite (unlike the
    full modular-lattice closure, which need not be).
    """
    pool: dict[tuple, Subspace] = {g.rows: g for g in generators}
    work = list(pool.values())
    while work:
        fresh = []
        for a in work:
            for g in generators:
                c = op(a, g)
                if c.rows not in pool:
                    if len(pool) >= cap:
                        raise RuntimeError(f"candidate closure exceeded cap {cap}")
                    pool[c.rows] = c
                    fresh.append(c)
        work = fresh
    return list(pool.values())


def candidate_subspaces(
    pair: TwistedPair, cap: int = 100_000, meet_budget: int = 48
) -> list[Subspace]:
    """Candidate pool for the exceptional subspace.

    Sums of intersections of the per-place kernels: generators are the
    exponent-level flags plus the single-form kernels of every active
    place; the pool is their meet-closure followed by its join-closure.
    (A full alternating closure can generate an infinite modular lattice,
    while the slope optimizer has this join-of-meets shape on every
    system whose answer is known in closed form.)  When the meet set
    exceeds `meet_budget` -- generic unrelated places, where the extra
    kernels only breed junk -- the joins are built over the flag meets
    only and the remaining meets enter as bare candidates.  For
    coordinate / all-ones systems the combinatorial candidates are added
    too.  The pool size is capped with a hard error on overflow.
    """
    pair.ensure_core_valid()
    n = pair.n
    flag_gens: dict[tuple, Subspace] = {}
    single_gens: dict[tuple, Subspace] = {}
    for base in (Subspace.zero(n), Subspace.full(n)):
        flag_gens[base.rows] = base
    for v, pd in pair.active.items():
        sorted_fc = _sorted_forms(pd)
        for form, _ in sorted_fc:
            s = Subspace.kernel(n, [form])
            single_gens[s.rows] = s
        for i in range(1, n + 1):
            if i < n and sorted_fc[i][1] == sorted_fc[i - 1][1]:
                continue  # not an exponent jump: flag carries zero weight
            s = Subspace.kernel(n, [f for f, _ in sorted_fc[:i]])
            flag_gens[s.rows] = s

    all_gens = list({**flag_gens, **single_gens}.values())
    meets = _semilattice_closure(all_gens, Subspace.intersect, cap)
    if len(meets) <= meet_budget:
        pool = {s.rows: s for s in _semilattice_closure(meets, Subspace.add, cap)}
    else:
        flag_meets = _semilattice_closure(list(flag_gens.values()), Subspace.intersect, cap)
        pool = {s.rows: s for s in _semilattice_closure(flag_meets, Subspace.add, cap)}
        for s in meets:
            pool.setdefault(s.rows, s)

    if _is_special_shaped(pair):
        for family in _partition_families(n):
            if len(pool) >= cap:
                break
            s = _partition_subspace(n, family)
            pool.setdefault(s.rows, s)
    return list(pool.values())


def exceptional_subspace(pair: TwistedPair, cap: int = 100_000) -> Subspace:
    """The unique proper subspace minimizing mu(full, U), of minimal dim.

    Under the per-place zero-sum normalization this is the minimal
    maximizer of w(U)/(n - dim U); the slope form is used so the result
    is invariant under exponent shifts.
    """
    n = pair.n
    w_full = weight(pair, Subspace.full(n))
    scored = []
    for cand in candidate_subspaces(pair, cap):
        if cand.dim == n:
            continue
        mu = Fraction(w_full - weight(pair, cand), n - cand.dim)
        scored.append(((mu, cand.dim), cand))
    best_key = min(key for key, _ in scored)
    winners = {cand.rows: cand for key, cand in scored if key == best_key}
    if len(winners) != 1:
        raise RuntimeError("exceptional subspace not unique among candidates")
    return next(iter(winners.values()))


@dataclass(frozen=True)
class FiltrationChain:
    """{0} = T_0 < T_1 < ... < T_r = Q^n with weights and slopes.

    The points (dim T_l, w(T_l)) are the vertices of the upper convex
    hull of all subspace points; slopes strictly decrease.
    """

    subspaces: tuple[Subspace, ...]
    weights: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subspaces)

    def __len__(self):
        return len(self.slopes)

    def slope_for_index(self, i: int) -> Fraction:
        """The slope governing the i-th successive infimum (1-based)."""
        for l in range(1, len(self.subspaces)):
            if self.subspaces[l - 1].dim < i <= self.subspaces[l].dim:
                return self.slopes[l - 1]
        raise IndexError(i)


def filtration(pair: TwistedPair) -> FiltrationChain:
    """The unique slope filtration, built by iterating the top subspace."""
    pair.ensure_core_valid()
    n = pair.n

    def rec(p: TwistedPair) -> list[Subspace]:
        t = exceptional_subspace(p)
        if t.dim == 0:
            return []
        below = rec(restrict_pair(p, t)) if 0 < t.dim < p.n else []
        return [embed_through(t, u) for u in below] + [t]

    middles = rec(pair)
    chain = [Subspace.zero(n)] + middles + [Subspace.full(n)]
    weights = tuple(weight(pair, s) for s in chain)
    slopes = []
    for l in range(1, len(chain)):
        dd = chain[l].dim - chain[l - 1].dim
        slopes.append(Fraction(weights[l] - weights[l - 1], dd))
    for a, b in zip(slopes, slopes[1:]):
        if not a > b:
            raise RuntimeError("filtration slopes are not strictly decreasing")
    return FiltrationChain(tuple(chain), weights, tuple(slopes))


def special_case_T(pair: TwistedPair):
    """Index sets I_1,...,I_p with T = {x : sum_{j in I_i} x_j = 0}.

    Only valid when every active form is a coordinate form or the
    all-ones form.  The partition search is independent of the generic
    candidate-lattice algorithm and the two must agree.
    """
    pair.ensure_core_valid()
    if not _is_special_shaped(pair):
        raise UnsupportedSystemError(
            "forms are not all coordinate forms or the all-ones form"
        )
    n = pair.n
    w_full = weight(pair, Subspace.full(n))
    scored = []
    for family in _partition_families(n):
        cand = _partition_subspace(n, family)
        if cand.dim == n:
            continue
        mu = Fraction(w_full - weight(pair, cand), n - cand.dim)
        scored.append(((mu, cand.dim), family, cand))
    best_key = min(key for key, _, _ in scored)
    winners = {c.rows: (fam, c) for key, fam, c in scored if key == best_key}
    if len(winners) != 1:
        raise RuntimeError("partition optimum not unique")
    family, cand = next(iter(winners.values()))
    generic = exceptional_subspace(pair)
    if cand != generic:
        raise RuntimeError(
            "combinatorial subspace disagrees with the generic algorithm"
        )
    return [tuple(sorted(j + 1 for j in block)) for block in family]


def restrict_pair(pair: TwistedPair, t: Subspace) -> TwistedPair:
    """The induced pair on Q^k through a fixed section of T (basis rows).

    At each place the greedy index set I_v(T) supplies k forms whose
    restrictions are independent on T; their exponents come along
    unchanged.
    """
    pair.ensure_core_valid()
    n, k = pair.n, t.dim
    if not 0 < k < n:
        raise ValueError("T must be proper and nonzero")
    basis = t.rows
    active = {}
    for v, pd in pair.active.items():
        chosen_forms = []
        chosen_exps = []
        tracker = _RankTracker()
        for form, c in _sorted_forms(pd):
            if tracker.try_add(_restriction(form, basis)):
                chosen_forms.append(_restriction(form, basis))
                chosen_exps.append(c)
                if len(chosen_forms) == k:
                    break
        active[v] = PlaceData(tuple(chosen_forms), tuple(chosen_exps))
    return TwistedPair(k, active).without_neutral_places()


def embed_through(t: Subspace, u: Subspace) -> Subspace:
    """phi'(U) for U in Q^k, where phi' sends e_i to the i-th basis row of T."""
    if u.n != t.dim:
        raise ValueError("dimension mismatch")
    if u.dim == 0:
        return Subspace.zero(t.n)
    rows = mat_mul([list(r) for r in u.rows], [list(r) for r in t.rows])
    return Subspace(t.n, rows)


def quotient_projection(t: Subspace) -> list[tuple[Fraction, ...]]:
    """Rows of the projection Q^n -> Q^(n-k) with kernel T.

    In echelon coordinates x decomposes as (part in T) + (part supported
    on the non-pivot columns); the projection returns the latter.
    """
    n, k = t.n, t.dim
    pivots = t.pivots
    nonpiv = [j for j in range(n) if j not in pivots]
    rows = []
    for j in nonpiv:
        row = [Fraction(0)] * n
        row[j] = Fraction(1)
        for i, pc in enumerate(pivots):
            row[pc] -= t.rows[i][j]
        rows.append(tuple(row))
    return rows


def quotient_preimage(t: Subspace, u: Subspace) -> Subspace:
    """phi''^{-1}(U) in Q^n for U a subspace of Q^(n-k)."""
    n = t.n
    nonpiv = [j for j in range(n) if j not in t.pivots]
    if u.n != len(nonpiv):
        raise ValueError("dimension mismatch")
    lifted = []
    for row in u.rows:
        v = [Fraction(0)] * n
        for coord, j in zip(row, nonpiv):
            v[j] = coord
        lifted.append(tuple(v))
    return Subspace(n, lifted + list(t.rows))


def quotient_pair(pair: TwistedPair, t: Subspace, normalized: bool = True) -> TwistedPair:
    """The induced pair on Q^(n-k) via forms vanishing on T.

    For each place the complementary forms are corrected by the unique
    combination of earlier greedy forms that kills them on T, then pushed
    through the projection.  With `normalized` the exponents are
    recentered per place: d_iv = ((n-k)/n) (c_iv - theta_v) with theta_v
    the mean complementary exponent, so each place sums to zero.
    """
    pair.ensure_core_valid()
    n, k = pair.n, t.dim
    if not 0 < k < n:
        raise ValueError("T must be proper and nonzero")
    basis = t.rows
    nonpiv = [j for j in range(n) if j not in t.pivots]
    active = {}
    for v, pd in pair.active.items():
        sorted_fc = _sorted_forms(pd)
        tracker = _RankTracker()
        sel: list[tuple] = []  # greedy forms, in sorted order
        comp: list[tuple[tuple, Fraction]] = []
        for form, c in sorted_fc:
            if len(sel) < k and tracker.try_add(_restriction(form, basis)):
                sel.append(form)
            else:
                comp.append((form, c))
        new_forms = []
        new_exps = []
        for form, c in comp:
            target = _restriction(form, basis)
            corrected = list(form)
            if sel:
                cols = [_restriction(f, basis) for f in sel]
                coeffs = solve_exact(list(zip(*cols)), target)
                if coeffs is None:
                    raise ValidationError("complementary form not reducible on T")
                for a, f in zip(coeffs, sel):
                    corrected = [x - a * y for x, y in zip(corrected, f)]
            if any(x != 0 for x in _restriction(corrected, basis)):
                raise AssertionError("corrected form fails to vanish on T")
            new_forms.append(tuple(corrected[j] for j in nonpiv))
            new_exps.append(c)
        if rank(new_forms) != n - k:
            raise ValidationError("quotient forms are dependent")
        if normalized:
            theta = sum(new_exps, Fraction(0)) / (n - k)
            new_exps = [Fraction(n - k, n) * (c - theta) for c in new_exps]
        active[v] = PlaceData(tuple(new_forms), tuple(new_exps))
    return TwistedPair(n - k, active).without_neutral_places()


def exterior_pair(pair: TwistedPair, p: int) -> TwistedPair:
    """The p-th exterior system on Q^N: wedged forms, summed exponents."""
    pair.ensure_core_valid()
    n = pair.n
    if not 1 <= p < n:
        raise ValueError(f"need 1 <= p < n, got p={p}")
    active = {}
    for v, pd in pair.active.items():
        forms = []
        exps = []
        for subset in combinations(range(n), p):
            forms.append(wedge([pd.forms[i] for i in subset]))
            exps.append(sum((pd.exps[i] for i in subset), Fraction(0)))
        active[v] = PlaceData(tuple(forms), tuple(exps))
    out = TwistedPair(math.comb(n, p), active).without_neutral_places()
    out.ensure_core_valid()
    return out
