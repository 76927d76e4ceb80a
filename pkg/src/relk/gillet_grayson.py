"""Low-dimensional Gillet-Grayson data: vertices, edges, paths and the boundary map.

A vertex is a pair of objects ``(X, X')``.  An edge from ``(X0, X0')`` to
``(X1, X1')`` is a pair of short exact sequences ``X0 >-> X1 ->> C`` (dotted)
and ``X0' >-> X1' ->> C`` (solid) with the same cokernel ``C``.  Discrete
modules of the module category are modeled by ``Disc``/``CoprodDisc`` atoms.

The boundary of a theta class is read off by killing compactly generated
atoms, lifting the middle edge of the resulting loop to the module category
and taking the endpoint ``(Q, P)`` of the lifted path to ``[P] - [Q]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import lca, sequences as sq
from .core_algebra import BassSwanTriple, k0_class
from .errors import EndpointMismatch, LiftProjectionMismatch
from .lca import CoprodDisc, Disc, LcaMorphism, LcaObject, ShiftCoprod
from .scripts import builtin_sw1_script
from .sequences import (
    CoprodShift,
    DirectSum,
    DoubleExact,
    IdentityRight,
    QuotientCg,
    Schematic,
    ShortExact,
)
from .theta import theta_schematic

__all__ = [
    "AMBIENTS",
    "GGVertex",
    "GGEdge",
    "Path",
    "BoundaryResult",
    "origin",
    "e_of_object",
    "loop_e",
    "quotient_cg",
    "expected_reduced_schematic",
    "same_sequence",
    "same_schematic",
    "lift_edge",
    "boundary",
    "builtin_sw1_script",
]

LCA, MOD, LCA_MOD_CG, MOD_MOD_FG = "LCA", "Mod", "LCA-mod-cg", "Mod-mod-fg"
AMBIENTS = (LCA, MOD, LCA_MOD_CG, MOD_MOD_FG)


@dataclass(frozen=True)
class GGVertex:
    first: LcaObject
    second: LcaObject
    ambient: str = LCA

    def __post_init__(self):
        if self.ambient not in AMBIENTS:
            raise ValueError(f"unknown ambient category {self.ambient!r}")

    def __str__(self) -> str:
        return f"({self.first}, {self.second})"


def origin(ambient: str = LCA) -> GGVertex:
    return GGVertex(lca.ZERO_OBJECT, lca.ZERO_OBJECT, ambient)


@dataclass(frozen=True)
class GGEdge:
    dotted: ShortExact
    solid: ShortExact
    ambient: str = LCA

    def __post_init__(self):
        if self.dotted.right != self.solid.right:
            raise EndpointMismatch(
                f"edge sequences have cokernels {self.dotted.right} and {self.solid.right}"
            )

    @property
    def source(self) -> GGVertex:
        return GGVertex(self.dotted.left, self.solid.left, self.ambient)

    @property
    def target(self) -> GGVertex:
        return GGVertex(self.dotted.mid, self.solid.mid, self.ambient)

    @property
    def degenerate(self) -> bool:
        return self.source == self.target and self.dotted.right.is_zero


@dataclass(frozen=True)
class Path:
    """Edges with orientation flags; ``False`` runs an edge backwards."""

    steps: tuple[tuple[GGEdge, bool], ...]
    start: GGVertex

    def __post_init__(self):
        at = self.start
        for n, (edge, forward) in enumerate(self.steps):
            a, b = (edge.source, edge.target) if forward else (edge.target, edge.source)
            if a != at:
                raise EndpointMismatch(f"step {n + 1} starts at {a}, path is at {at}")
            at = b

    @property
    def end(self) -> GGVertex:
        at = self.start
        for edge, forward in self.steps:
            at = edge.target if forward else edge.source
        return at

    @property
    def closed(self) -> bool:
        return self.end == self.start

    def vertices(self) -> list[GGVertex]:
        out = [self.start]
        for edge, forward in self.steps:
            out.append(edge.target if forward else edge.source)
        return out


# ---------------------------------------------------------------------------
# The loop attached to a double exact sequence


def e_of_object(A: LcaObject, ambient: str = LCA) -> GGEdge:
    """The edge from ``(0, 0)`` to ``(A, A)`` given twice by ``0 >-> A = A``."""
    s = sq.exact(IdentityRight(A))
    return GGEdge(s, s, ambient)


def loop_e(d: DoubleExact, ambient: str = LCA) -> Path:
    """``e(A)``, then ``(Yang, Yin)`` as (dotted, solid), then ``e(B)`` backwards."""
    d.validate()
    steps = (
        (e_of_object(d.left, ambient), True),
        (GGEdge(d.yang, d.yin, ambient), True),
        (e_of_object(d.mid, ambient), False),
    )
    path = Path(steps, origin(ambient))
    if not path.closed:
        raise EndpointMismatch("loop does not return to (0, 0)")
    return path


# ---------------------------------------------------------------------------
# Killing compactly generated atoms


def _quotient_row(r: ShortExact) -> ShortExact:
    return sq.exact(QuotientCg(r.cert))


def quotient_cg(x):
    """Kill Disc, Vect, Torus and ProdTorus atoms in an object, morphism or schematic.

    Rows of a schematic that become ``0 -> 0 -> 0`` are dropped.
    """
    if isinstance(x, LcaObject):
        return lca.quotient_cg_object(x)
    if isinstance(x, LcaMorphism):
        return lca.quotient_cg_morphism(x)
    if isinstance(x, ShortExact):
        return _quotient_row(x)
    if isinstance(x, Schematic):

        def rows(rs):
            out = (_quotient_row(r) for r in rs)
            return tuple(r for r in out if not all(o.is_zero for o in r.objects()))

        w = x.wiring
        wiring = sq.Wiring(*(lca.quotient_cg_morphism(m) for m in (w.left, w.mid, w.right)))
        return Schematic(rows(x.above), rows(x.below), wiring)
    raise TypeError(f"cannot take the quotient of {type(x).__name__}")


def _plain_row(mid: LcaObject, sur: LcaMorphism, cert) -> ShortExact:
    """``0 -> mid -> mid`` with an explicitly built surjection."""
    zero = lca.zero_morphism(lca.ZERO_OBJECT, mid)
    return ShortExact(lca.ZERO_OBJECT, mid, mid, zero, sur, cert)


def expected_reduced_schematic(t: BassSwanTriple) -> Schematic:
    """Rows ``1`` on (+)P and ``s`` on (+)Q above; ``s`` on (+)P and ``1`` on (+)Q below."""
    P, Q = LcaObject.of(CoprodDisc(t.P)), LcaObject.of(CoprodDisc(t.Q))

    def one(X):
        return _plain_row(X, lca.identity(X), IdentityRight(X))

    def shift(X, M):
        s = lca.single(ShiftCoprod(M)) if not X.is_zero else lca.identity(X)
        return _plain_row(X, s, QuotientCg(CoprodShift(M)))

    above = [one(P), shift(Q, t.Q)]
    below = [shift(P, t.P), one(Q)]

    def keep(rows):
        return tuple(r for r in rows if not r.mid.is_zero)

    col = P + Q
    zero = lca.identity(lca.ZERO_OBJECT)
    return Schematic(keep(above), keep(below), sq.Wiring(zero, lca.identity(col), lca.identity(col)))


def same_sequence(a: ShortExact, b: ShortExact) -> bool:
    """Equal objects and equal maps after normalization; certificates are ignored."""
    return (
        a.objects() == b.objects()
        and bool(lca.equal_morphisms(a.inc, b.inc))
        and bool(lca.equal_morphisms(a.sur, b.sur))
    )


def same_schematic(a: Schematic, b: Schematic) -> bool:
    if len(a.above) != len(b.above) or len(a.below) != len(b.below):
        return False
    if not all(same_sequence(x, y) for x, y in zip(a.above + a.below, b.above + b.below)):
        return False
    pairs = zip((a.wiring.left, a.wiring.mid, a.wiring.right), (b.wiring.left, b.wiring.mid, b.wiring.right))
    return all((f.source, f.target) == (g.source, g.target) and lca.equal_morphisms(f, g) for f, g in pairs)


# ---------------------------------------------------------------------------
# Lifting and the boundary


def lift_edge(reduced: DoubleExact, t: BassSwanTriple, strict_orientation: bool = False) -> GGEdge:
    """The module-category edge ``Q >-> (+)P + (+)Q`` (dotted), ``P >-> (+)P + (+)Q`` (solid).

    Its quotient must reproduce the middle edge of the reduced loop.  By
    default the two sequences are matched as an unordered pair; with
    ``strict_orientation`` dotted must match Yang and solid must match Yin.
    """
    cP, cQ = LcaObject.of(CoprodDisc(t.P)), LcaObject.of(CoprodDisc(t.Q))
    dotted = sq.exact(DirectSum((IdentityRight(cP), CoprodShift(t.Q))))
    solid = sq.exact(DirectSum((CoprodShift(t.P), IdentityRight(cQ))))
    if dotted.right != cP + cQ or solid.right != cP + cQ:
        raise LiftProjectionMismatch("lifted sequences do not have cokernel (+)P + (+)Q")
    if dotted.left != LcaObject.of(Disc(t.Q)) or solid.left != LcaObject.of(Disc(t.P)):
        raise LiftProjectionMismatch("lifted sequences do not have kernels Q and P")
    edge = GGEdge(dotted, solid, MOD)
    qd, qs = _quotient_row(dotted), _quotient_row(solid)
    if strict_orientation:
        ok = same_sequence(qd, reduced.yang) and same_sequence(qs, reduced.yin)
    else:
        ok = (same_sequence(qd, reduced.yang) and same_sequence(qs, reduced.yin)) or (
            same_sequence(qd, reduced.yin) and same_sequence(qs, reduced.yang)
        )
    if not ok:
        raise LiftProjectionMismatch("the lifted edge does not project to the middle edge of the loop")
    return edge


@dataclass(frozen=True)
class BoundaryResult:
    k0: tuple[int, ...]
    endpoint: GGVertex
    path: Path
    reduced: Schematic


def endpoint_for(t: BassSwanTriple) -> GGVertex:
    """The vertex ``(Q, P)`` of the module category."""
    return GGVertex(LcaObject.of(Disc(t.Q)), LcaObject.of(Disc(t.P)), MOD)


def vertex_class(v: GGVertex) -> tuple[int, ...] | None:
    """``(X, X') |-> [X'] - [X]`` for vertices made of Disc atoms over one order."""
    def cls(obj: LcaObject):
        out = None
        for a in obj:
            if a.kind is not lca.Kind.DISC:
                return None
            c = k0_class(a.module)
            out = c if out is None else tuple(x + y for x, y in zip(out, c))
        return out

    a, b = cls(v.first), cls(v.second)
    if a is None and b is None:
        return ()
    if a is None:
        a = (0,) * len(b)
    if b is None:
        b = (0,) * len(a)
    return tuple(y - x for x, y in zip(a, b))


def boundary(t: BassSwanTriple) -> BoundaryResult:
    """Kill cg atoms in theta, lift the loop and return ``[P] - [Q]`` with the lifted path."""
    reduced_s = quotient_cg(theta_schematic(t))
    reduced = sq.compile_schematic(reduced_s)
    lifted = lift_edge(reduced, t)
    B = reduced.mid
    path = Path(((e_of_object(B, MOD), True), (lifted, False)), origin(MOD))
    end = path.end
    if end != endpoint_for(t):
        raise LiftProjectionMismatch(f"lifted path ends at {end}, expected (Q, P)")
    k0 = tuple(p - q for p, q in zip(k0_class(t.P), k0_class(t.Q)))
    if t.P.rank + t.Q.rank and vertex_class(end) != k0:
        raise LiftProjectionMismatch("endpoint class differs from [P] - [Q]")
    return BoundaryResult(k0, end, path, reduced_s)


def path_edges(path: Path) -> Sequence[dict]:
    """A plain description of a path, for reports."""
    out = []
    for edge, forward in path.steps:
        a, b = (edge.source, edge.target) if forward else (edge.target, edge.source)
        out.append({"from": [str(a.first), str(a.second)], "to": [str(b.first), str(b.second)],
                    "forward": forward, "dotted": str(edge.dotted), "solid": str(edge.solid)})
    return out
