"""Brute-force estimation of successive infima and related experiments.

Primitive integer vectors up to a box bound are enumerated once; exact
twisted heights ride along as mantissa * Q^exponent pairs (no prime
factorization in the hot loop), and a streaming matroid greedy keeps the
current best independent n-tuple.  The reported lambda-bar values are
upper estimates of the true infima: lambda_i <= lambda_bar_i always.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .exact_reals import FactoredReal
from .exterior_algebra import Subspace, wedge
from .filtration import FiltrationChain, exterior_pair, filtration
from .places_heights import INF, Place, abs_value, primitive_scale
from .rational_linalg import det, qvec, rank
from .twisted_system import (
    PlaceData,
    TwistedPair,
    ValidationError,
    alpha_of,
    pair_invariants,
    theta_of,
    twisted_height,
    validate,
)

__all__ = [
    "InfimaEstimate",
    "successive_infima",
    "enumerate_primitive",
    "default_box_policy",
    "minkowski_check",
    "MinkowskiReport",
    "slope_profile",
    "SlopeReport",
    "slope_csv",
    "exterior_infima_check",
    "ExteriorReport",
    "gap_experiment",
    "GapReport",
    "SystemInstance",
    "scan_system",
    "ScanReport",
    "height_floor",
]

_LOG_TOL = 1e-9


def enumerate_primitive(n: int, box: int):
    """Primitive integer vectors with sup norm <= box, one per line.

    gcd 1, first nonzero coordinate positive: every rational line through
    the box is hit exactly once.
    """
    if box < 1:
        raise ValueError("box must be >= 1")
    rng = range(-box, box + 1)
    for tup in product(rng, repeat=n):
        lead = 0
        for c in tup:
            if c != 0:
                lead = c
                break
        if lead <= 0:
            continue
        g = 0
        for c in tup:
            g = math.gcd(g, c)
        if g == 1:
            yield tup


class _FastHeight:
    """Exact twisted-height evaluation as (mantissa, Q-exponent) pairs.

    Per place the forms are cleared to integer matrices; the correction
    factor for the clearing enters the mantissa.  Values are
    mantissa * Q**exponent with both parts rational, plus a float log10
    for cheap comparisons (exact fallback on near-ties).
    """

    def __init__(self, pair: TwistedPair, q):
        pair.ensure_core_valid()
        self.q = Fraction(q)
        if self.q < 1:
            raise ValueError("Q must be >= 1")
        self.logq = math.log10(self.q) if self.q != 1 else 0.0
        self.places = []
        seen = set(pair.active) | {INF}
        for v in sorted(seen):
            pd = pair.place_data(v)
            den = math.lcm(*(a.denominator for f in pd.forms for a in f))
            int_forms = [tuple(int(a * den) for a in f) for f in pd.forms]
            if v.is_infinite:
                corr = Fraction(1, den)
            else:
                e = 0
                d = den
                while d % v.p == 0:
                    d //= v.p
                    e += 1
                corr = Fraction(v.p ** e)
            exps = [-c for c in pd.exps]
            logc = [float(e) * self.logq for e in exps]
            self.places.append((v, int_forms, exps, logc, corr, math.log10(corr)))

    def value(self, x):
        """(log10 float, mantissa Fraction, Q-exponent Fraction) of H(x)."""
        q = self.q
        tot_m = Fraction(1)
        tot_e = Fraction(0)
        tot_log = 0.0
        for v, int_forms, exps, logc, corr, logcorr in self.places:
            best = None
            for form, e, le in zip(int_forms, exps, logc):
                s = 0
                for a, b in zip(form, x):
                    s += a * b
                if s == 0:
                    continue
                if v.p is None:
                    m = Fraction(abs(s))
                    lm = math.log10(abs(s))
                else:
                    k = 0
                    p = v.p
                    while s % p == 0:
                        s //= p
                        k += 1
                    m = Fraction(1, p ** k)
                    lm = -k * math.log10(p)
                cand = (lm + le, m, e)
                if best is None:
                    best = cand
                elif cand[0] > best[0] + _LOG_TOL:
                    best = cand
                elif cand[0] > best[0] - _LOG_TOL:
                    if _cmp_scaled(cand[1], cand[2], best[1], best[2], q) > 0:
                        best = cand
            if best is None:
                raise ValidationError(f"all forms at {v.label()} vanish on {x}")
            tot_m *= corr * best[1]
            tot_e += best[2]
            tot_log += logcorr + best[0]
        return tot_log, tot_m, tot_e

    def to_factored(self, m: Fraction, e: Fraction) -> FactoredReal:
        out = FactoredReal.from_rational(m)
        if e != 0:
            out = out * FactoredReal.from_rational(self.q) ** e
        return out


def _cmp_scaled(m1, e1, m2, e2, q) -> int:
    """Exact comparison of m1*q^e1 vs m2*q^e2 for positive rationals."""
    if e1 == e2:
        return (m1 > m2) - (m1 < m2)
    d = e2 - e1
    lhs = Fraction(m1, m2) ** d.denominator
    rhs = Fraction(q) ** d.numerator
    return (lhs > rhs) - (lhs < rhs)


@dataclass
class _Record:
    seq: int
    vec: tuple
    logf: float
    mant: Fraction
    qexp: Fraction


def _cmp_records(a: _Record, b: _Record, q) -> int:
    """Value comparison with float prefilter; 0 means equal values."""
    if a.logf > b.logf + _LOG_TOL:
        return 1
    if a.logf < b.logf - _LOG_TOL:
        return -1
    return _cmp_scaled(a.mant, a.qexp, b.mant, b.qexp, q)


class _RankTrackerInt:
    def __init__(self):
        self.rows = []

    def full(self, n):
        return len(self.rows) >= n

    def try_add(self, vec) -> bool:
        v = [Fraction(c) for c in vec]
        for row in self.rows:
            piv = next(i for i, x in enumerate(row) if x != 0)
            if v[piv] != 0:
                f = v[piv] / row[piv]
                v = [a - f * b for a, b in zip(v, row)]
        if all(x == 0 for x in v):
            return False
        self.rows.append(v)
        return True


def _greedy_basis(records: list[_Record], n: int, q) -> list[_Record]:
    order = sorted(records, key=_CmpKey(q))  # value order, seq tie-break
    tracker = _RankTrackerInt()
    sel = []
    for r in order:
        if tracker.try_add(r.vec):
            sel.append(r)
            if len(sel) == n:
                break
    return sel


class _CmpKey:
    def __init__(self, q):
        self.q = q

    def __call__(self, record):
        return _SortProxy(record, self.q)


class _SortProxy:
    __slots__ = ("r", "q")

    def __init__(self, r, q):
        self.r = r
        self.q = q

    def __lt__(self, other):
        c = _cmp_records(self.r, other.r, self.q)
        if c != 0:
            return c < 0
        return self.r.seq < other.r.seq


@dataclass
class InfimaEstimate:
    """Upper estimates of the successive infima at one (Q, box)."""

    q: Fraction
    box: int
    lambdas: tuple[FactoredReal, ...]
    achievers: tuple[tuple[int, ...], ...]
    spans: tuple[Subspace, ...]

    def log10_lambdas(self) -> tuple[float, ...]:
        return tuple(l.log10_float() for l in self.lambdas)


def successive_infima(pair: TwistedPair, q, box: int, extra_vectors=()) -> InfimaEstimate:
    """Enumerate, sort by exact twisted height, select greedily.

    Returns non-decreasing lambda-bar values achieved by independent
    primitive vectors, plus span estimates: spans[i-1] is spanned by all
    enumerated vectors of height <= lambda_bar_i.  True infima are never
    larger than the reported estimates.
    """
    n = pair.n
    fh = _FastHeight(pair, q)
    qq = fh.q

    seeds = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    extras = [primitive_scale(v) for v in extra_vectors]

    sel: list[_Record] = []
    buffer: list[_Record] = []
    seq = 0

    def feed(vec):
        nonlocal sel, seq
        logf, m, e = fh.value(vec)
        rec = _Record(seq, vec, logf, m, e)
        seq += 1
        if len(sel) == n:
            c = _cmp_records(rec, sel[-1], qq)
            if c > 0:
                return
            buffer.append(rec)
            if len(buffer) > 100_000:
                buffer[:] = [r for r in buffer if _cmp_records(r, sel[-1], qq) <= 0]
            if c == 0:
                return
        else:
            buffer.append(rec)
        sel = _greedy_basis(sel + [rec], n, qq)

    for vec in seeds:
        feed(vec)
    for vec in extras:
        feed(vec)
    seen_box = set(seeds) | set(extras)
    for vec in enumerate_primitive(n, box):
        if vec in seen_box:
            continue
        feed(vec)

    if len(sel) < n:
        raise RuntimeError("failed to find n independent vectors (internal)")

    lambdas = tuple(fh.to_factored(r.mant, r.qexp) for r in sel)
    achievers = tuple(r.vec for r in sel)

    spans = []
    for i in range(n):
        thr = sel[i]
        tracker = _RankTrackerInt()
        vecs = []
        for rec in buffer:
            if tracker.full(n):
                break
            if _cmp_records(rec, thr, qq) <= 0 and tracker.try_add(rec.vec):
                vecs.append(rec.vec)
        spans.append(Subspace.span(n, vecs))
    return InfimaEstimate(qq, box, lambdas, achievers, tuple(spans))


def default_box_policy(pair: TwistedPair, raw_cap: int = 2_000_000):
    """B(Q) = ceil(Q^c_max), capped so the raw box has <= raw_cap tuples."""
    n = pair.n
    cmax = 0.0
    for pd in pair.active.values():
        for c in pd.exps:
            cmax = max(cmax, abs(float(c)))
    bcap = 1
    while (2 * (bcap + 1) + 1) ** n <= raw_cap:
        bcap += 1

    def policy(q) -> int:
        want = math.ceil(float(q) ** cmax) if cmax > 0 else 1
        return max(1, min(want, bcap))

    return policy


@dataclass
class MinkowskiReport:
    q: Fraction
    box: int
    product: FactoredReal
    lower: FactoredReal
    upper: FactoredReal
    lower_ok: bool
    upper_ok: bool


def minkowski_check(pair: TwistedPair, q, box: int) -> MinkowskiReport:
    """Sandwich n^{-n/2} Delta Q^{-alpha} <= prod lambda_i <= 2^{n(n-1)/2} Delta Q^{-alpha}.

    The lower bound must hold for any box (estimates only overshoot the
    true infima); the upper bound can fail for small boxes and is
    reported.
    """
    est = successive_infima(pair, q, box)
    n = pair.n
    delta, _ = pair_invariants(pair)
    alpha = alpha_of(pair)
    qpow = FactoredReal.from_rational(Fraction(q)) ** (-alpha)
    lower = FactoredReal.from_rational(n) ** Fraction(-n, 2) * delta * qpow
    upper = FactoredReal.from_rational(2) ** Fraction(n * (n - 1), 2) * delta * qpow
    prod = FactoredReal.one()
    for l in est.lambdas:
        prod = prod * l
    lower_ok = lower <= prod
    upper_ok = prod <= upper
    if not lower_ok:
        raise RuntimeError("Minkowski lower bound violated by an upper estimate")
    return MinkowskiReport(Fraction(q), box, prod, lower, upper, lower_ok, upper_ok)


@dataclass
class SlopeReport:
    """Per-index slope estimates log lambda_i(Q)/log Q against the chain."""

    qs: tuple[Fraction, ...]
    chain: FiltrationChain
    rows: list[tuple[Fraction, int, float, float]]  # (Q, i, log10 lambda, slope)
    expected: tuple[float, ...]  # -mu for each index i
    span_matches: dict[Fraction, bool]

    def slopes_at(self, q) -> list[float]:
        return [row[3] for row in self.rows if row[0] == q]


def slope_profile(pair: TwistedPair, q_list, box_policy=None) -> SlopeReport:
    """Estimated slopes for each Q in an increasing list, vs the filtration."""
    qs = [Fraction(q) for q in q_list]
    if any(q < 2 for q in qs) or any(b >= c for b, c in zip(qs, qs[1:])):
        raise ValueError("q_list must be increasing and >= 2")
    if box_policy is None:
        box_policy = default_box_policy(pair)
    chain = filtration(pair)
    n = pair.n
    expected = tuple(-float(chain.slope_for_index(i)) for i in range(1, n + 1))
    rows = []
    matches = {}
    for q in qs:
        est = successive_infima(pair, q, box_policy(q))
        logq = math.log10(float(q))
        for i, lam in enumerate(est.lambdas, start=1):
            ll = lam.log10_float()
            rows.append((q, i, ll, ll / logq))
        ok = True
        for l in range(1, len(chain.subspaces) - 1):
            d_l = chain.subspaces[l].dim
            if est.spans[d_l - 1] != chain.subspaces[l]:
                ok = False
        matches[q] = ok
    return SlopeReport(tuple(qs), chain, rows, expected, matches)


def slope_csv(report: SlopeReport) -> str:
    lines = ["Q,i,log10_lambda,slope"]
    for q, i, ll, s in report.rows:
        lines.append(f"{q},{i},{ll:.12f},{s:.12f}")
    return "\n".join(lines) + "\n"


@dataclass
class ExteriorReport:
    p: int
    hadamard_ok: bool
    upper_ok: bool
    lower_ok: bool
    nus: tuple[FactoredReal, ...]
    hat_lambdas: tuple[FactoredReal, ...]


def exterior_infima_check(pair: TwistedPair, p: int, q, box: int) -> ExteriorReport:
    """Wedge-height inequalities on the achiever vectors.

    (a) the Hadamard-type bound Hhat(x_1 ^ ... ^ x_p) <= p^{p/2} prod H(x_l)
    is asserted exactly on all achiever subsets; (b) the products nu_j of
    p-subsets of lambda-bars are compared against the exterior system's
    estimates: the upper half (hat-lambda_j <= p^{p/2} nu_j) is rigorous
    for estimates because the achiever wedges are injected into the
    exterior search, the lower half is reported only.
    """
    n = pair.n
    if not 1 <= p < n:
        raise ValueError("need 1 <= p < n")
    est = successive_infima(pair, q, box)
    hat = exterior_pair(pair, p)
    qfr = FactoredReal.from_rational(Fraction(q))
    const = FactoredReal.from_rational(p) ** Fraction(p, 2)

    hadamard_ok = True
    wedges = []
    for subset in combinations(range(n), p):
        w = wedge([est.achievers[i] for i in subset])
        wedges.append((subset, w))
        lhs = twisted_height(hat, q, w)
        rhs = const
        for i in subset:
            rhs = rhs * est.lambdas[i]
        if not lhs <= rhs:
            hadamard_ok = False

    nus = sorted(
        (
            math.prod((est.lambdas[i] for i in subset), start=FactoredReal.one())
            for subset in combinations(range(n), p)
        ),
    )
    hat_est = successive_infima(hat, q, box, extra_vectors=[w for _, w in wedges])

    big_n = math.comb(n, p)
    upper_ok = all(
        hl <= const * nu for hl, nu in zip(hat_est.lambdas, nus)
    )
    lowc = FactoredReal.from_rational(big_n) ** Fraction(-n * p * big_n)
    lower_ok = all(lowc * nu <= hl for hl, nu in zip(hat_est.lambdas, nus))
    return ExteriorReport(p, hadamard_ok, upper_ok, lower_ok, tuple(nus), hat_est.lambdas)


@dataclass
class GapReport:
    a: Fraction
    delta: Fraction
    box: int
    threshold: FactoredReal
    solutions: tuple[tuple[int, ...], ...]
    span: Subspace
    proper: bool


def gap_experiment(pair: TwistedPair, delta, a, box: int) -> GapReport:
    """All x in the box with H_{L,c,A}(x) < Delta^{1/n} A^{-delta/2} span a proper subspace."""
    delta = Fraction(delta)
    a = Fraction(a)
    if not 0 < delta <= 1:
        raise ValueError("delta must be in (0, 1]")
    rep = validate(pair)
    if not rep.normalized_ok:
        raise ValidationError("gap experiment needs a (2.8)/(2.9)-normalized pair")
    n = pair.n
    if FactoredReal.from_rational(a) ** delta < FactoredReal.from_rational(n):
        raise ValueError("need A >= n^(1/delta)")
    dl, _ = pair_invariants(pair)
    threshold = dl ** Fraction(1, n) * FactoredReal.from_rational(a) ** (-delta / 2)
    thr_log = threshold.log10_float()
    fh = _FastHeight(pair, a)
    sols = []
    for vec in enumerate_primitive(n, box):
        logf, m, e = fh.value(vec)
        if logf > thr_log + _LOG_TOL:
            continue
        if fh.to_factored(m, e) < threshold:
            sols.append(vec)
    span = Subspace.span(n, sols) if sols else Subspace.zero(n)
    return GapReport(a, delta, box, threshold, tuple(sols), span, span.dim < n)


class SystemInstance:
    """A Diophantine system: forms and exponents d_iv <= 0 with sum -n-eps."""

    def __init__(self, n: int, epsilon, places):
        if n < 2:
            raise ValidationError("system dimension must be >= 2")
        self.n = n
        self.epsilon = Fraction(epsilon)
        data = {}
        for place, pd in places.items():
            if not isinstance(place, Place):
                place = Place.parse(place)
            if not isinstance(pd, PlaceData):
                forms, exps = pd
                pd = PlaceData(tuple(qvec(f) for f in forms), qvec(exps))
            data[place] = pd
        self.places = dict(sorted(data.items()))
        self._validate()

    def _validate(self):
        if not 0 < self.epsilon <= 1:
            raise ValidationError("epsilon must be in (0, 1]")
        total = Fraction(0)
        for v, pd in self.places.items():
            if len(pd.forms) != self.n or len(pd.exps) != self.n:
                raise ValidationError(f"place {v.label()}: wrong arity")
            if rank(pd.forms) != self.n:
                raise ValidationError(f"forms at {v.label()} are dependent")
            if any(d > 0 for d in pd.exps):
                raise ValidationError(f"exponents at {v.label()} must be <= 0")
            total += sum(pd.exps)
        if total != -self.n - self.epsilon:
            raise ValidationError(
                f"exponent sum is {total}, expected {-self.n - self.epsilon}"
            )

    def a_value(self, v: Place) -> FactoredReal:
        """A_v = |det forms|_v^{1/n}."""
        d = det(self.places[v].forms)
        return abs_value(d, v) ** Fraction(1, self.n)


@dataclass
class ScanReport:
    solutions: list[dict]
    t_prime: Subspace
    reduced_delta: Fraction
    histogram: dict[int, int]
    bin_ratio: Fraction


def scan_system(sys: SystemInstance, h_max, box: int) -> ScanReport:
    """Enumerate primitive solutions of the system, classify against T'.

    A vector solves the system when |L_i(x)|_v / |x|_v <= A_v H(x)^{d_iv}
    holds exactly at every listed place; solutions are reported with
    their heights, membership in the exceptional subspace of the reduced
    twisted pair, and a multiplicative height histogram.
    """
    from .bounds_reduction import reduce_system
    from .filtration import exceptional_subspace

    h_max = Fraction(h_max)
    pair, delta, _ = reduce_system(sys)
    t_prime = exceptional_subspace(pair)
    ratio = 1 + delta / 2

    a_vals = {v: sys.a_value(v) for v in sys.places}
    solutions = []
    hist: dict[int, int] = {}
    bmax = min(box, int(h_max))
    for vec in enumerate_primitive(sys.n, bmax):
        h = max(abs(c) for c in vec)
        if h > h_max:
            continue
        hfr = FactoredReal.from_rational(h)
        ok = True
        for v, pd in sys.places.items():
            xnorm = _sup_norm(vec, v)
            for form, d in zip(pd.forms, pd.exps):
                val = sum(a * b for a, b in zip(form, vec))
                lhs = abs_value(val, v)
                if lhs is None:
                    continue
                rhs = a_vals[v] * hfr ** d * xnorm
                if not lhs <= rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            k = _mult_bin(h, ratio)
            hist[k] = hist.get(k, 0) + 1
            solutions.append(
                {"x": vec, "height": h, "in_T_prime": t_prime.contains_vector(vec)}
            )
    return ScanReport(solutions, t_prime, delta, hist, ratio)


def _sup_norm(vec, v: Place) -> FactoredReal:
    best = None
    for c in vec:
        av = abs_value(Fraction(c), v)
        if av is None:
            continue
        if best is None or av > best:
            best = av
    return best


def _mult_bin(h: int, ratio: Fraction) -> int:
    """k with ratio^k <= h < ratio^(k+1), exact."""
    if h < 1:
        raise ValueError("height must be >= 1")
    k = 0
    power = Fraction(1)
    while power * ratio <= h:
        power *= ratio
        k += 1
    return k


def height_floor(pair: TwistedPair, q) -> FactoredReal:
    """n^{-1} H_L^{-C(r,n)} Q^{-theta}: a floor under every twisted height."""
    _, h = pair_invariants(pair)
    r = validate(pair).r
    theta = theta_of(pair)
    qfr = (
        FactoredReal.from_rational(Fraction(q))
        if not isinstance(q, FactoredReal)
        else q
    )
    n = pair.n
    return (
        FactoredReal.from_rational(Fraction(1, n))
        * h ** Fraction(-math.comb(r, n))
        * qfr ** (-theta)
    )
