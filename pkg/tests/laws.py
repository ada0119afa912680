"""Choice-function laws as plain predicates, shared by the property tests."""

import random
from fractions import Fraction

from divstable.choice import choose


def C(z, q):
    return choose(z, q).chosen


def leq(a, b):
    return all(u <= v for u, v in zip(a, b))


def vmax(a, b):
    return tuple(max(u, v) for u, v in zip(a, b))


def vmin(a, b):
    return tuple(min(u, v) for u, v in zip(a, b))


def random_view(rng: random.Random, max_edges=8, denominator=6):
    """Caps, quota and two admissible vectors on the grid k/denominator."""
    n = rng.randint(0, max_edges)
    d = rng.randint(1, denominator)
    caps = tuple(Fraction(rng.randint(0, 8 * d), d) for _ in range(n))
    q = Fraction(rng.randint(0, 10 * d), d)
    z = tuple(Fraction(rng.randint(0, int(b * d)), d) for b in caps)
    zp = tuple(Fraction(rng.randint(0, int(b * d)), d) for b in caps)
    return caps, q, z, zp


def between(rng, lo, hi, d=5):
    """A vector on a grid between ``lo`` and ``hi`` componentwise."""
    return tuple(a + (b - a) * Fraction(rng.randint(0, d), d) for a, b in zip(lo, hi))


def consistence(rng, z, q):
    cz = C(z, q)
    zp = between(rng, cz, z)
    return C(zp, q) == cz


def persistence(rng, z, q):
    zp = between(rng, tuple(0 for _ in z), z)
    return leq(vmin(C(z, q), zp), C(zp, q))


def stationarity(z, zp, q):
    return C(vmax(z, zp), q) == C(vmax(C(z, q), zp), q) and C(C(z, q), q) == C(z, q)


def quota_filling(z, q):
    cz = C(z, q)
    if sum(z) >= q:
        return sum(cz) == q
    return cz == z


def all_laws(rng, z, zp, q):
    return {
        "consistence": consistence(rng, z, q),
        "persistence": persistence(rng, z, q),
        "stationarity": stationarity(z, zp, q),
        "quota_filling": quota_filling(z, q),
    }
