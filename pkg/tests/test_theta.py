from __future__ import annotations

from collections import Counter
from fractions import Fraction

from hypothesis import given

from conftest import invertible_matrices, triples
from relk import lca
from relk.codec import des_key
from relk.core_algebra import RatMatrix, free, make_triple
from relk.lca import CoprodDisc, Disc, Kind, LcaElement, ProdTorus, Torus, Vect
from relk.nenashev import check_zero_rule
from relk.theta import theta, theta_schematic


def M(rows):
    return RatMatrix.of(rows, cols=len(rows[0]) if rows else 0)


P, Q = free(1, "P"), free(1, "Q")
T2 = make_triple(P, M([[2]]), Q)


def _twisted_row(t):
    return theta_schematic(t).below[3]


def test_twisted_row_values():
    row = _twisted_row(T2)
    x = LcaElement(row.left, ((1,),))
    assert lca.eval_morphism(row.inc, x).values == ((Fraction(1, 2),),)
    v = LcaElement(row.mid, ((Fraction(3, 4),),))
    assert lca.eval_morphism(row.sur, v).values == ((Fraction(1, 2),),)


def test_identity_twist_is_the_lattice_row():
    Z2 = free(2, "Z2")
    t = make_triple(Z2, RatMatrix.identity(2), Z2)
    row = _twisted_row(t)
    assert row.objects() == (lca.LcaObject.of(Disc(Z2)), lca.LcaObject.of(Vect(Z2)), lca.LcaObject.of(Torus(Z2)))
    assert lca.equal_morphisms(row.inc, lca.single(lca.Iota(Z2)))
    assert lca.equal_morphisms(row.sur, lca.single(lca.QuotT(Z2)))


def test_rank_zero_schematic_is_all_zero():
    t = make_triple(free(0, "P"), M([]), free(0, "Q"))
    s = theta_schematic(t)
    assert all(o.is_zero for r in s.above + s.below for o in r.objects())
    check_zero_rule(theta(t))


def test_objects_of_scalar_triple():
    d = theta(T2)
    mid = Counter(d.mid)
    assert mid == Counter([CoprodDisc(P), Vect(P), ProdTorus(P), CoprodDisc(Q), ProdTorus(Q)])
    assert Counter(d.left) == Counter([Disc(P), ProdTorus(P), Disc(Q), ProdTorus(Q)])
    assert Counter(d.right) == Counter([CoprodDisc(P), Torus(P), CoprodDisc(Q), Torus(Q)])


def test_different_phi_differs_only_in_twisted_blocks():
    d2, d3 = theta(T2), theta(make_triple(P, M([[3]]), Q))
    assert d2.objects() == d3.objects()
    assert lca.normalize(d2.yin.inc) == lca.normalize(d3.yin.inc)
    assert lca.normalize(d2.yin.sur) == lca.normalize(d3.yin.sur)
    diff = []
    for a, b in ((d2.yang.inc, d3.yang.inc), (d2.yang.sur, d3.yang.sur)):
        na, nb = lca.normal_blocks(a), lca.normal_blocks(b)
        diff += [(a.source[j].kind, a.target[i].kind) for i, j in set(na) | set(nb) if na.get((i, j)) != nb.get((i, j))]
    assert sorted(diff) == [(Kind.DISC, Kind.VECT), (Kind.VECT, Kind.TORUS)]
    assert des_key(d2) != des_key(d3)


@given(triples(max_rank=3))
def test_theta_validates(t):
    d = theta(t)
    d.validate()
    for s in (d.yin, d.yang):
        assert lca.is_zero_morphism(lca.compose(s.sur, s.inc))


@given(invertible_matrices(2), invertible_matrices(2))
def test_yin_does_not_depend_on_phi(a, b):
    P2, Q2 = free(2, "P"), free(2, "Q")
    y1, y2 = theta(make_triple(P2, a, Q2)).yin, theta(make_triple(P2, b, Q2)).yin
    assert y1.objects() == y2.objects()
    assert lca.normalize(y1.inc) == lca.normalize(y2.inc)
    assert lca.normalize(y1.sur) == lca.normalize(y2.sur)
