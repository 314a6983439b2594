import random
from fractions import Fraction

import pytest


@pytest.fixture
def rng():
    return random.Random(0)


def random_fraction(rng, lo=-9, hi=9, max_den=7, nonzero=False):
    while True:
        f = Fraction(rng.randint(lo, hi), rng.randint(1, max_den))
        if not nonzero or f != 0:
            return f


def random_positive_fraction(rng, hi=400, max_den=60):
    return Fraction(rng.randint(1, hi), rng.randint(1, max_den))


def random_vector(rng, n, nonzero=True):
    while True:
        v = tuple(random_fraction(rng) for _ in range(n))
        if not nonzero or any(c != 0 for c in v):
            return v
