"""Seeded random inputs for the builtin scripts and the acceptance suite."""

from __future__ import annotations

import random
from fractions import Fraction

from .core_algebra import BassSwanTriple, RatMatrix, SwanMorphism, free, make_triple
from .scripts import SplitData


def rational(rng: random.Random, bound: int = 100) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def invertible(rng: random.Random, n: int, bound: int = 100) -> RatMatrix:
    while True:
        m = RatMatrix.of([[rational(rng, bound) for _ in range(n)] for _ in range(n)], cols=n)
        if m.det() != 0:
            return m


def unimodular(rng: random.Random, n: int, moves: int = 4) -> RatMatrix:
    """A random element of GL_n(Z): a signed permutation times elementary moves."""
    perm = list(range(n))
    rng.shuffle(perm)
    m = RatMatrix.of(
        [[rng.choice((1, -1)) if perm[i] == j else 0 for j in range(n)] for i in range(n)], cols=n
    )
    for _ in range(moves if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        e = [[int(r == c) for c in range(n)] for r in range(n)]
        e[i][j] = rng.randint(-2, 2)
        m = RatMatrix.of(e, cols=n) @ m
    return m


def triple(rng: random.Random, max_rank: int = 3, bound: int = 100, same_module: bool = False) -> BassSwanTriple:
    n = rng.randint(0, max_rank)
    P = free(n, "P")
    Q = P if same_module else free(n, "Q")
    return make_triple(P, invertible(rng, n, bound), Q)


def composable_pair(rng: random.Random, max_rank: int = 3, bound: int = 100) -> tuple[BassSwanTriple, BassSwanTriple]:
    n = rng.randint(1, max_rank)
    P, Q, R = free(n, "P"), free(n, "Q"), free(n, "R")
    return make_triple(P, invertible(rng, n, bound), Q), make_triple(Q, invertible(rng, n, bound), R)


def _stack(top: RatMatrix, bottom: RatMatrix) -> RatMatrix:
    return RatMatrix.of([list(r) for r in top.entries + bottom.entries], cols=top.cols)


def _side(left: RatMatrix, right: RatMatrix) -> RatMatrix:
    return RatMatrix.of([list(a) + list(b) for a, b in zip(left.entries, right.entries)], cols=left.cols + right.cols)


def split_instance(rng: random.Random, max_rank: int = 2, bound: int = 100):
    """Swan morphisms ``a, b`` along split sequences ``P' -> P -> P''`` and splitting data.

    ``P = g (P' + P'')`` and ``Q = h (Q' + Q'')`` for unimodular ``g, h``; the
    middle isomorphism is ``h [[a', c], [0, a'']] g^-1`` with ``c`` arbitrary.
    """
    r1 = rng.randint(0, max_rank)
    r2 = rng.randint(0, max_rank - r1)
    r = r1 + r2
    g, h = unimodular(rng, r), unimodular(rng, r)
    gi, hi = g.inverse(), h.inverse()
    I1, I2 = RatMatrix.identity(r1), RatMatrix.identity(r2)
    incl = _stack(I1, RatMatrix.zero(r2, r1))
    proj = _side(RatMatrix.zero(r2, r1), I2)
    ret = _side(I1, RatMatrix.zero(r1, r2))
    sec = _stack(RatMatrix.zero(r1, r2), I2)
    a1, a2 = invertible(rng, r1, bound), invertible(rng, r2, bound)
    c = RatMatrix.of([[rational(rng, bound) for _ in range(r2)] for _ in range(r1)], cols=r2)
    mid = _stack(_side(a1, c), _side(RatMatrix.zero(r2, r1), a2))
    alpha = h @ mid @ gi
    P1, P, P2 = free(r1, "P'"), free(r, "P"), free(r2, "P''")
    Q1, Q, Q2 = free(r1, "Q'"), free(r, "Q"), free(r2, "Q''")
    t1, t, t2 = make_triple(P1, a1, Q1), make_triple(P, alpha, Q), make_triple(P2, a2, Q2)
    a = SwanMorphism(t1, t, g @ incl, h @ incl)
    b = SwanMorphism(t, t2, proj @ gi, proj @ hi)
    split = SplitData(ret @ gi, g @ sec, ret @ hi, h @ sec)
    return a, b, split
