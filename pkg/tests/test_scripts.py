from __future__ import annotations

import random

import pytest

from relk.core_algebra import RatMatrix, SwanMorphism, delta, free, make_triple
from relk.errors import StepInvalid
from relk.instances import composable_pair, invertible, split_instance
from relk.nenashev import LeftRightSwap, LinearCombine, replay
from relk.scripts import (
    SplitData,
    automorphism_representative,
    builtin_relation_a_script,
    builtin_relation_b_script,
    builtin_sv1_script,
    builtin_sw1_script,
)
from relk.theta import theta


def M(rows, cols=None):
    return RatMatrix.of(rows, cols=len(rows[0]) if rows else (cols or 0))


@pytest.mark.parametrize("n", [0, 1, 3])
def test_sv1(n):
    P = free(n, "P")
    der = replay(builtin_sv1_script(P))
    assert der.matches([(1, theta(make_triple(P, RatMatrix.identity(n), P)))])


# ---------------------------------------------------------------------------
# Relation A


def _block_instance():
    Z1, Z2, P = free(1, "P'"), free(1, "P''"), free(2, "P")
    Q1, Q2, Q = free(1, "Q'"), free(1, "Q''"), free(2, "Q")
    t1, t, t2 = make_triple(Z1, M([[2]]), Q1), make_triple(P, M([[2, 0], [0, 3]]), Q), make_triple(Z2, M([[3]]), Q2)
    incl, proj = M([[1], [0]]), M([[0, 1]])
    ret, sec = M([[1, 0]]), M([[0], [1]])
    a, b = SwanMorphism(t1, t, incl, incl), SwanMorphism(t, t2, proj, proj)
    return a, b, SplitData(ret, sec, ret, sec)


def _check_relation_a(a, b, split):
    der = replay(builtin_relation_a_script(a, b, split))
    assert der.matches([(1, theta(a.source)), (-1, theta(a.target)), (1, theta(b.target))])


def test_relation_a_block_diagonal():
    _check_relation_a(*_block_instance())


def test_relation_a_zero_modules():
    O = free(0, "O")
    t = make_triple(O, M([], 0), O)
    z = M([], 0)
    _check_relation_a(SwanMorphism(t, t, z, z), SwanMorphism(t, t, z, z), SplitData(z, z, z, z))


@pytest.mark.parametrize("seed", range(4))
def test_relation_a_random(seed):
    _check_relation_a(*split_instance(random.Random(seed), 2))


def test_relation_a_rejects_broken_square():
    a, b, split = _block_instance()
    bad = SwanMorphism(a.source, a.target, a.p, M([[1], [1]]))
    with pytest.raises(StepInvalid):
        builtin_relation_a_script(bad, b, split)


# ---------------------------------------------------------------------------
# Relation B


def _check_relation_b(t1, t2):
    s = builtin_relation_b_script(t1, t2)
    der = replay(s)
    t13 = make_triple(t1.P, t2.phi @ t1.phi, t2.Q)
    assert der.matches([(1, theta(t1)), (1, theta(t2)), (-1, theta(t13))])
    assert isinstance(s.steps[-1], LinearCombine)


def test_relation_b_scalars():
    P, Q, R = free(1, "P"), free(1, "Q"), free(1, "R")
    _check_relation_b(make_triple(P, M([[2]]), Q), make_triple(Q, M([[3]]), R))


def test_relation_b_with_identity():
    P, Q = free(1, "P"), free(1, "Q")
    _check_relation_b(make_triple(P, M([[5]]), Q), make_triple(Q, M([[1]]), free(1, "R")))


def test_relation_b_random_rank_two():
    rng = random.Random(11)
    P, Q, R = free(2, "P"), free(2, "Q"), free(2, "R")
    _check_relation_b(make_triple(P, invertible(rng, 2, 9), Q), make_triple(Q, invertible(rng, 2, 9), R))


@pytest.mark.parametrize("seed", range(3))
def test_relation_b_seeded(seed):
    _check_relation_b(*composable_pair(random.Random(seed), 1))


# ---------------------------------------------------------------------------
# Role exchange against the automorphism class


@pytest.mark.parametrize("phi", [M([[1]]), M([[2]]), M([[1, 2], [3, -1]])])
def test_sw1(phi):
    n = phi.rows
    s = builtin_sw1_script(phi, n)
    assert isinstance(s.steps[-2], LeftRightSwap)
    der = replay(s)
    assert der.matches([(1, theta(delta(phi, n))), (1, automorphism_representative(phi, n))])
    assert [r["rule"] for r in der.admitted_rules].count("LeftRightSwap") == 1
