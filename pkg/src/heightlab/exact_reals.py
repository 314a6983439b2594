"""Exact arithmetic for positive reals of the form prod p**e_p.

Every height value produced by this package over the rationals is a
finite product of prime powers with rational exponents.  FactoredReal
stores that exponent map exactly, so multiplication, rational powers and
order comparisons never round.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from sympy import factorint

__all__ = ["FactoredReal", "ONE"]

_RatLike = (int, Fraction)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _iv_endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact Fraction endpoints of an mpmath.iv value."""
    lo, hi = x._mpi_
    out = []
    for sign, man, exp, _ in (lo, hi):
        f = Fraction(int(man)) * Fraction(2) ** int(exp)
        out.append(-f if sign else f)
    return out[0], out[1]


class FactoredReal:
    """A positive real number prod_p p**e_p with rational exponents e_p.

    The exponent map is canonical (no zero exponents, prime keys only),
    so two values are equal iff their maps are equal.  Instances are
    immutable and hashable.
    """

    __slots__ = ("_f", "_hash")

    def __init__(self, factors=None, _trusted: bool = False):
        if factors is None:
            f = {}
        elif _trusted:
            f = dict(factors)
        else:
            f = {}
            for p, e in dict(factors).items():
                e = _as_fraction(e)
                if e == 0:
                    continue
                if not (isinstance(p, int) and p >= 2 and _is_prime(p)):
                    raise ValueError(f"key {p!r} is not prime")
                f[int(p)] = e
        object.__setattr__(self, "_f", f)
        object.__setattr__(self, "_hash", None)

    # -- construction -------------------------------------------------

    @classmethod
    def one(cls) -> "FactoredReal":
        return cls({}, _trusted=True)

    @classmethod
    def from_rational(cls, q) -> "FactoredReal":
        """Prime factorization of a positive rational."""
        q = _as_fraction(q)
        if q <= 0:
            raise ValueError(f"from_rational needs a positive rational, got {q}")
        f: dict[int, Fraction] = {}
        for p, e in factorint(q.numerator).items():
            f[int(p)] = Fraction(e)
        for p, e in factorint(q.denominator).items():
            f[int(p)] = f.get(int(p), Fraction(0)) - e
        return cls({p: e for p, e in f.items() if e != 0}, _trusted=True)

    @classmethod
    def prime_power(cls, p: int, e) -> "FactoredReal":
        e = _as_fraction(e)
        if e == 0:
            return cls.one()
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        return cls({p: e}, _trusted=True)

    # -- arithmetic ----------------------------------------------------

    def __mul__(self, other: "FactoredReal") -> "FactoredReal":
        if not isinstance(other, FactoredReal):
            return NotImplemented
        f = dict(self._f)
        for p, e in other._f.items():
            s = f.get(p, Fraction(0)) + e
            if s == 0:
                f.pop(p, None)
            else:
                f[p] = s
        return FactoredReal(f, _trusted=True)

    def __truediv__(self, other: "FactoredReal") -> "FactoredReal":
        if not isinstance(other, FactoredReal):
            return NotImplemented
        return self * other ** -1

    def __pow__(self, e) -> "FactoredReal":
        e = _as_fraction(e)
        if e == 0:
            return FactoredReal.one()
        return FactoredReal({p: ex * e for p, ex in self._f.items()}, _trusted=True)

    # -- comparisons ----------------------------------------------------

    def cmp(self, other: "FactoredReal") -> int:
        """Exact ordering: -1, 0 or 1.

        Clears exponent denominators by their lcm M and compares the two
        integer-exponent products as big integers; (a/b)**M > 1 iff a > b.
        """
        diff: dict[int, Fraction] = dict(self._f)
        for p, e in other._f.items():
            s = diff.get(p, Fraction(0)) - e
            if s == 0:
                diff.pop(p, None)
            else:
                diff[p] = s
        if not diff:
            return 0
        m = math.lcm(*(e.denominator for e in diff.values()))
        num = 1
        den = 1
        for p, e in diff.items():
            k = int(e * m)
            if k > 0:
                num *= p ** k
            else:
                den *= p ** (-k)
        return (num > den) - (num < den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactoredReal):
            return NotImplemented
        return self._f == other._f

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(tuple(sorted(self._f.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # -- views -----------------------------------------------------------

    @property
    def factors(self) -> dict[int, Fraction]:
        return dict(self._f)

    def is_one(self) -> bool:
        return not self._f

    def to_fraction(self) -> Fraction:
        """Exact rational value; raises if some exponent is non-integral."""
        num = 1
        den = 1
        for p, e in self._f.items():
            if e.denominator != 1:
                raise ValueError(f"{self!r} is not rational")
            k = e.numerator
            if k > 0:
                num *= p ** k
            else:
                den *= p ** (-k)
        return Fraction(num, den)

    # -- logarithms -------------------------------------------------------

    def log10_exact(self) -> Fraction | None:
        """The exact rational log10, when the value is a power of 10."""
        if not self._f:
            return Fraction(0)
        if set(self._f) == {2, 5} and self._f[2] == self._f[5]:
            return self._f[2]
        return None

    def log10(self, digits: int = 12) -> tuple[Fraction, Fraction]:
        """(approximation, error bound) with error <= 10**-digits.

        Directed rounding via interval arithmetic; the bound is certified.
        """
        if digits < 1:
            raise ValueError("digits must be >= 1")
        exact = self.log10_exact()
        if exact is not None:
            return exact, Fraction(0)
        target = Fraction(1, 10 ** digits)
        dps = digits + 15
        while True:
            iv = mpmath.iv
            old = iv.dps
            try:
                iv.dps = dps
                total = iv.mpf(0)
                ln10 = iv.log(10)
                for p, e in sorted(self._f.items()):
                    term = iv.log(p) / ln10
                    term = term * iv.mpf(e.numerator) / iv.mpf(e.denominator)
                    total = total + term
                lo, hi = _iv_endpoints(total)
            finally:
                iv.dps = old
            mid = (lo + hi) / 2
            err = (hi - lo) / 2
            if err <= target:
                return mid, err
            dps *= 2
            if dps > 10_000:
                raise RuntimeError("log10 failed to converge")

    def log10_float(self) -> float:
        """Fast float approximation of log10 (about 1e-12 absolute error)."""
        return math.fsum(float(e) * math.log10(p) for p, e in self._f.items())

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list[list[int]]:
        """[[prime, exp_numerator, exp_denominator], ...] sorted by prime."""
        return [[p, e.numerator, e.denominator] for p, e in sorted(self._f.items())]

    @classmethod
    def from_json(cls, data) -> "FactoredReal":
        return cls({int(p): Fraction(int(n), int(d)) for p, n, d in data})

    def __repr__(self):
        if not self._f:
            return "FactoredReal(1)"
        parts = []
        for p, e in sorted(self._f.items()):
            parts.append(f"{p}^{e}" if e.denominator != 1 or e < 0 else f"{p}^{e.numerator}")
        return "FactoredReal(" + " * ".join(parts) + ")"


def _is_prime(p: int) -> bool:
    from sympy import isprime

    return bool(isprime(p))


ONE = FactoredReal.one()
