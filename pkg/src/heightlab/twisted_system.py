"""Twisted-height systems (L, c) over Q and their basic invariants.

A pair assigns to finitely many "active" places a tuple of n independent
rational linear forms and n rational exponents; every other place
carries the coordinate forms with zero exponents.  With rational data
every twisted height value is an exact FactoredReal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_reals import FactoredReal
from .places_heights import INF, Place, abs_value, primitive_scale
from .rational_linalg import det, mat_vec, qvec, rank

__all__ = [
    "TwistedPair",
    "PlaceData",
    "ValidationReport",
    "ValidationError",
    "validate",
    "twisted_height",
    "pair_invariants",
    "shift_exponents",
    "compose",
    "form_union",
    "theta_of",
    "alpha_of",
    "pair_to_json",
    "pair_from_json",
    "frac_str",
    "parse_frac",
]


class ValidationError(Exception):
    """Raised when an operation requires a core-valid pair and gets none."""


def _identity_forms(n: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class PlaceData:
    """Forms and exponents carried by one active place."""

    forms: tuple[tuple[Fraction, ...], ...]
    exps: tuple[Fraction, ...]

    def is_neutral(self, n: int) -> bool:
        return self.forms == _identity_forms(n) and all(e == 0 for e in self.exps)


class TwistedPair:
    """The system (L, c): dimension n plus per-place forms and exponents.

    Any place absent from `active` carries the identity forms and zero
    exponents.  Instances are immutable after construction; structural
    checks happen here, the mathematical conditions in validate().
    """

    __slots__ = ("n", "active", "_core_checked")

    def __init__(self, n: int, active=None):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        self.n = n
        data = {}
        for place, pd in (active or {}).items():
            if not isinstance(place, Place):
                place = Place.parse(place)
            if not isinstance(pd, PlaceData):
                forms, exps = pd
                pd = PlaceData(tuple(qvec(f) for f in forms), qvec(exps))
            if len(pd.forms) != n or any(len(f) != n for f in pd.forms) or len(pd.exps) != n:
                raise ValueError(f"place {place}: need n forms of length n and n exponents")
            data[place] = pd
        self.active = dict(sorted(data.items()))
        self._core_checked = False

    def place_data(self, v: Place) -> PlaceData:
        pd = self.active.get(v)
        if pd is None:
            return PlaceData(_identity_forms(self.n), tuple(Fraction(0) for _ in range(self.n)))
        return pd

    def places(self) -> list[Place]:
        return list(self.active)

    def without_neutral_places(self) -> "TwistedPair":
        kept = {v: pd for v, pd in self.active.items() if not pd.is_neutral(self.n)}
        return TwistedPair(self.n, kept)

    def ensure_core_valid(self):
        if self._core_checked:
            return
        report = validate(self)
        if not report.core_ok:
            raise ValidationError("; ".join(report.messages) or "pair is not core-valid")
        self._core_checked = True

    def __eq__(self, other):
        if not isinstance(other, TwistedPair):
            return NotImplemented
        return self.n == other.n and self.active == other.active

    def __repr__(self):
        return f"TwistedPair(n={self.n}, places={[v.label() for v in self.active]})"


@dataclass
class ValidationReport:
    """Outcome of checking the defining and normalization conditions."""

    core_ok: bool
    normalized_ok: bool
    r: int
    messages: list[str] = field(default_factory=list)


def form_union(pair: TwistedPair) -> list[tuple[Fraction, ...]]:
    """The distinct forms over all places (raw coefficient tuples).

    Inactive places always exist, so the coordinate forms are always
    included.  No rescaling before deduplication: the system invariants
    are sensitive to form scaling.
    """
    seen = []
    for f in _identity_forms(pair.n):
        seen.append(f)
    for pd in pair.active.values():
        for f in pd.forms:
            if f not in seen:
                seen.append(f)
    return seen


def validate(pair: TwistedPair) -> ValidationReport:
    """Check the core conditions and the two normalizations separately."""
    msgs: list[str] = []
    core_ok = True
    for v, pd in pair.active.items():
        if rank(pd.forms) != pair.n:
            core_ok = False
            msgs.append(f"forms at {v.label()} are linearly dependent")
    sums_ok = True
    for v, pd in pair.active.items():
        if sum(pd.exps) != 0:
            sums_ok = False
            msgs.append(f"exponent sum at {v.label()} is {sum(pd.exps)}, not 0")
    max_sum = sum(max(pd.exps) for pd in pair.active.values()) if pair.active else Fraction(0)
    if max_sum > 1:
        msgs.append(f"sum of per-place max exponents is {max_sum} > 1")
    normalized_ok = core_ok and sums_ok and max_sum <= 1
    return ValidationReport(core_ok, normalized_ok, len(form_union(pair)), msgs)


def theta_of(pair: TwistedPair) -> Fraction:
    """sum_v max_i c_iv (inactive places contribute 0)."""
    return sum((max(pd.exps) for pd in pair.active.values()), Fraction(0))


def alpha_of(pair: TwistedPair) -> Fraction:
    """sum_v sum_i c_iv."""
    return sum((sum(pd.exps) for pd in pair.active.values()), Fraction(0))


def twisted_height(pair: TwistedPair, q, x) -> FactoredReal:
    """H_{L,c,Q}(x) = prod_v max_i |L_i^(v)(x)|_v Q^{-c_iv}, exact.

    x is scaled to a primitive integer vector first (the height is
    projectively invariant), after which every inactive place
    contributes 1 and the product is finite.  Q may be a rational or a
    FactoredReal (for parameters like H^{1+eps/n}).
    """
    pair.ensure_core_valid()
    if isinstance(q, FactoredReal):
        qfr = q
    else:
        qfr = FactoredReal.from_rational(Fraction(q))
    if qfr < FactoredReal.one():
        raise ValueError("Q must be >= 1")
    prim = primitive_scale(x)  # raises on x = 0
    total = FactoredReal.one()
    places = set(pair.active)
    places.add(INF)
    for v in places:
        pd = pair.place_data(v)
        best = None
        for form, c in zip(pd.forms, pd.exps):
            val = sum(a * b for a, b in zip(form, prim))
            av = abs_value(val, v)
            if av is None:
                continue
            cand = av * qfr ** (-c)
            if best is None or cand > best:
                best = cand
        if best is None:
            raise ValidationError(f"all forms at {v.label()} vanish on x")
        total = total * best
    return total


def pair_invariants(pair: TwistedPair) -> tuple[FactoredReal, FactoredReal]:
    """(Delta_L, H_L): the determinant product and the n-subset maximum.

    Asserts the sandwich H_L^(1 - C(r,n)) <= Delta_L <= H_L.
    """
    pair.ensure_core_valid()
    n = pair.n
    delta = FactoredReal.one()
    for v, pd in pair.active.items():
        d = det(pd.forms)
        av = abs_value(d, v)
        if av is None:
            raise ValidationError(f"singular forms at {v.label()}")
        delta = delta * av

    union = form_union(pair)
    r = len(union)
    dets = []
    from itertools import combinations

    for rows in combinations(union, n):
        d = det(rows)
        if d != 0:
            dets.append(d)
    h = FactoredReal.one()
    places = set(pair.active)
    places.add(INF)
    for d in dets:
        for p, _ in FactoredReal.from_rational(abs(d)).factors.items():
            places.add(Place.finite(p))
    for v in places:
        best = None
        for d in dets:
            av = abs_value(d, v)
            if best is None or av > best:
                best = av
        h = h * best

    binom = math.comb(r, n)
    if not (h ** (1 - binom) <= delta <= h):
        raise AssertionError("determinant sandwich violated (internal error)")
    return delta, h


def shift_exponents(pair: TwistedPair, theta) -> TwistedPair:
    """Replace c_iv by c_iv - theta_v; heights scale by Q^Theta."""
    shifts = {}
    for place, t in theta.items():
        if not isinstance(place, Place):
            place = Place.parse(place)
        shifts[place] = Fraction(t)
    active = dict(pair.active)
    for v, t in shifts.items():
        if t == 0:
            continue
        pd = pair.place_data(v)
        active[v] = PlaceData(pd.forms, tuple(c - t for c in pd.exps))
    return TwistedPair(pair.n, active).without_neutral_places()


def compose(pair: TwistedPair, phi) -> TwistedPair:
    """The system L∘φ for an invertible rational matrix φ.

    Active places keep their exponents with composed forms.  Places where
    φ is not p-adically neutral (entry denominators, primes dividing
    det φ) plus the infinite place become active with the rows of φ and
    zero exponents; everywhere else composing with φ does not change the
    local factor, so the identity-default convention still represents
    L∘φ exactly height-wise.
    """
    n = pair.n
    rows = [qvec(r) for r in phi]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("phi must be n x n")
    d = det(rows)
    if d == 0:
        raise ValueError("phi is singular")

    bad_primes = set()
    primes_of = lambda k: set(FactoredReal.from_rational(Fraction(abs(k))).factors)
    for row in rows:
        for entry in row:
            if entry.denominator != 1:
                bad_primes |= primes_of(entry.denominator)
    bad_primes |= primes_of(d.numerator)
    bad_primes |= primes_of(d.denominator)

    targets = set(pair.active) | {INF} | {Place.finite(p) for p in bad_primes}
    cols = list(zip(*rows))
    active = {}
    for v in targets:
        pd = pair.place_data(v)
        new_forms = tuple(
            tuple(sum(a * c for a, c in zip(form, col)) for col in cols) for form in pd.forms
        )
        active[v] = PlaceData(new_forms, pd.exps)
    return TwistedPair(n, active).without_neutral_places()


def apply_matrix(phi, x):
    """phi(x) for an n x n matrix given as rows."""
    return mat_vec([qvec(r) for r in phi], qvec(x))


# -- JSON ----------------------------------------------------------------


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    return Fraction(s)


def pair_to_json(pair: TwistedPair) -> dict:
    return {
        "n": pair.n,
        "places": [
            {
                "place": v.label(),
                "forms": [[frac_str(a) for a in form] for form in pd.forms],
                "exps": [frac_str(c) for c in pd.exps],
            }
            for v, pd in pair.active.items()
        ],
    }


def pair_from_json(data) -> TwistedPair:
    active = {}
    for entry in data["places"]:
        place = Place.parse(entry["place"])
        forms = tuple(tuple(parse_frac(a) for a in form) for form in entry["forms"])
        exps = tuple(parse_frac(c) for c in entry["exps"])
        active[place] = PlaceData(forms, exps)
    return TwistedPair(int(data["n"]), active)
