"""Exterior products, Grassmann coordinates, subspace heights and duality.

Subspaces of Q^n are stored as reduced row-echelon bases, so equality and
containment are cheap and exact.  Heights of subspaces go through the
squared Euclidean height of a Grassmann coordinate vector, which keeps
everything rational.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .places_heights import height_two_squared
from .rational_linalg import det, kernel_basis, qvec, rank, rref

__all__ = [
    "subsets_lex",
    "wedge",
    "Subspace",
    "subspace_height_sq",
    "orth_complement",
]


def subsets_lex(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    """The C(n,p) p-element subsets of {1..n} in lexicographic order."""
    if not 1 <= p < n:
        raise ValueError(f"need 1 <= p < n, got p={p}, n={n}")
    return tuple(tuple(i + 1 for i in c) for c in combinations(range(n), p))


def wedge(vectors) -> tuple[Fraction, ...]:
    """Exterior product of p vectors in Q^n: the vector of p x p minors.

    Coordinates are indexed by the lexicographic p-subsets of columns;
    the result is zero iff the input vectors are dependent.
    """
    rows = [qvec(v) for v in vectors]
    if not rows:
        raise ValueError("empty wedge")
    n = len(rows[0])
    p = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("dimension mismatch in wedge")
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    out = []
    for cols in combinations(range(n), p):
        sub = [[row[c] for c in cols] for row in rows]
        out.append(det(sub))
    return tuple(out)


class Subspace:
    """A rational subspace of Q^n as a canonical reduced-echelon basis.

    Equality of subspaces is equality of basis matrices.
    """

    __slots__ = ("n", "rows", "pivots")

    def __init__(self, n: int, rows=(), _canonical: bool = False):
        if n < 0:
            raise ValueError("ambient dimension must be >= 0")
        self.n = n
        if _canonical:
            self.rows = tuple(tuple(r) for r in rows)
            self.pivots = tuple(next(i for i, x in enumerate(r) if x != 0) for r in self.rows)
            return
        red, pivots = rref([qvec(r) for r in rows])
        if any(len(r) != n for r in red):
            raise ValueError("basis rows must have length n")
        self.rows = tuple(tuple(r) for r in red)
        self.pivots = tuple(pivots)

    @staticmethod
    def zero(n: int) -> "Subspace":
        return Subspace(n, (), _canonical=True)

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, [[Fraction(i == j) for j in range(n)] for i in range(n)], _canonical=True)

    @staticmethod
    def span(n: int, vectors) -> "Subspace":
        return Subspace(n, vectors)

    @staticmethod
    def kernel(n: int, forms) -> "Subspace":
        """Common kernel in Q^n of the given linear forms."""
        rows = [qvec(f) for f in forms]
        if not rows:
            return Subspace.full(n)
        return Subspace(n, kernel_basis(rows, n), _canonical=True)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains_vector(self, x) -> bool:
        x = qvec(x)
        return rank(list(self.rows) + [x]) == self.dim

    def contains(self, other: "Subspace") -> bool:
        if other.dim > self.dim:
            return False
        return rank(list(self.rows) + list(other.rows)) == self.dim

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise ValueError("ambient dimension mismatch")
        # U cap W is the kernel of the stacked annihilators.
        ann = list(kernel_basis(self.rows, self.n)) + list(kernel_basis(other.rows, self.n))
        return Subspace.kernel(self.n, ann)

    def add(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise ValueError("ambient dimension mismatch")
        return Subspace(self.n, list(self.rows) + list(other.rows))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"


def subspace_height_sq(t: Subspace) -> Fraction:
    """H_2(T)^2; equal to 1 for the zero and full subspaces.

    Computed from the echelon basis; basis-independent because Grassmann
    coordinates of two bases differ by a nonzero scalar.
    """
    if t.dim == 0 or t.dim == t.n:
        return Fraction(1)
    return height_two_squared(wedge(t.rows))


def orth_complement(t: Subspace) -> Subspace:
    """The space of linear forms vanishing on T, as a subspace of Q^n."""
    if t.dim == 0:
        return Subspace.full(t.n)
    return Subspace.kernel(t.n, t.rows)
