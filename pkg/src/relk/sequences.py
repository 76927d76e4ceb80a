"""Certified short exact sequences, double exact sequences and schematics.

Exactness is never decided semantically.  A sequence carries a certificate
from a closed vocabulary; the certificate determines canonical objects and
maps, and validation checks the supplied data against them.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Hashable, Sequence, Union

from .core_algebra import FreeModule, RatMatrix
from .errors import (
    ColumnMismatch,
    CompositeNotZero,
    EndpointMismatch,
    TagMismatch,
    WiringNotIso,
)
from . import lca
from .lca import (
    Atom,
    cached_hash,
    CoprodDisc,
    Disc,
    Id,
    LcaMorphism,
    LcaObject,
    ProdTorus,
    Torus,
    Vect,
    ZERO_OBJECT,
)


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class LatticeInVector:
    """``P -> P_R -> T_P``."""

    P: FreeModule


@cached_hash
@dataclass(frozen=True)
class PhiTwisted:
    """``Q -> P_R -> T_Q`` with maps ``phi^-1 . iota_Q`` and ``q_Q . phi``."""

    P: FreeModule
    phi: RatMatrix
    Q: FreeModule


@dataclass(frozen=True)
class CoprodShift:
    """``P -> (+)P -> (+)P``, inclusion at index 0 then the left shift."""

    P: FreeModule


@dataclass(frozen=True)
class ProdShift:
    """``(x)T_P -> (x)T_P -> T_P``, the right shift then the 0th coordinate."""

    P: FreeModule


@dataclass(frozen=True)
class IdentityLeft:
    """``X = X -> 0``."""

    X: LcaObject


@dataclass(frozen=True)
class IdentityRight:
    """``0 -> X = X``."""

    X: LcaObject


@dataclass(frozen=True)
class ZeroSeq:
    pass


@cached_hash
@dataclass(frozen=True)
class DirectSum:
    parts: tuple


@cached_hash
@dataclass(frozen=True)
class RewiredByIso:
    """Transport ``inner`` along isomorphisms out of its three objects."""

    inner: object
    left_iso: LcaMorphism
    mid_iso: LcaMorphism
    right_iso: LcaMorphism


@cached_hash
@dataclass(frozen=True)
class SplitWitness:
    """A sequence shown exact by a retraction of ``inc`` and a section of ``sur``."""

    left: LcaObject
    mid: LcaObject
    right: LcaObject
    inc: LcaMorphism
    sur: LcaMorphism
    retraction: LcaMorphism
    section: LcaMorphism


@dataclass(frozen=True)
class QuotientCg:
    """Image of ``inner`` after killing compactly generated atoms."""

    inner: object


Certificate = Union[
    LatticeInVector, PhiTwisted, CoprodShift, ProdShift, IdentityLeft, IdentityRight,
    ZeroSeq, DirectSum, RewiredByIso, SplitWitness, QuotientCg,
]


@functools.lru_cache(maxsize=None)
def _phi_inverse(phi: RatMatrix) -> RatMatrix:
    return phi.inverse()


def _inverse_or_fail(iso: LcaMorphism, what: str) -> LcaMorphism:
    inv = lca.try_inverse(iso)
    if inv is None:
        raise TagMismatch(f"{what} of a rewiring certificate is not an isomorphism")
    return inv


@functools.lru_cache(maxsize=None)
def canonical(cert) -> tuple[LcaObject, LcaObject, LcaObject, LcaMorphism, LcaMorphism]:
    """Objects and maps a certificate stands for; raises TagMismatch on bad witnesses."""
    if isinstance(cert, LatticeInVector):
        P = cert.P
        return (
            LcaObject.of(Disc(P)), LcaObject.of(Vect(P)), LcaObject.of(Torus(P)),
            lca.morphism([Disc(P)], [Vect(P)], {(0, 0): lca.Iota(P)}),
            lca.morphism([Vect(P)], [Torus(P)], {(0, 0): lca.QuotT(P)}),
        )
    if isinstance(cert, PhiTwisted):
        P, Q, phi = cert.P, cert.Q, cert.phi
        if phi.shape != (Q.dim, P.dim) or phi.det() == 0:
            raise TagMismatch(f"twist matrix is not an isomorphism {P}_R -> {Q}_R")
        inc = lca.readback(Disc(Q), Vect(P), ((0, _phi_inverse(phi)),)) if P.dim else None
        sur = lca.readback(Vect(P), Torus(Q), ((0, phi),)) if P.dim else None
        return (
            LcaObject.of(Disc(Q)), LcaObject.of(Vect(P)), LcaObject.of(Torus(Q)),
            lca.morphism([Disc(Q)], [Vect(P)], {(0, 0): inc} if inc else {}),
            lca.morphism([Vect(P)], [Torus(Q)], {(0, 0): sur} if sur else {}),
        )
    if isinstance(cert, CoprodShift):
        P = cert.P
        return (
            LcaObject.of(Disc(P)), LcaObject.of(CoprodDisc(P)), LcaObject.of(CoprodDisc(P)),
            lca.morphism([Disc(P)], [CoprodDisc(P)], {(0, 0): lca.InclCoprod0(P)}),
            lca.morphism([CoprodDisc(P)], [CoprodDisc(P)], {(0, 0): lca.ShiftCoprod(P)}),
        )
    if isinstance(cert, ProdShift):
        P = cert.P
        return (
            LcaObject.of(ProdTorus(P)), LcaObject.of(ProdTorus(P)), LcaObject.of(Torus(P)),
            lca.morphism([ProdTorus(P)], [ProdTorus(P)], {(0, 0): lca.ShiftProd(P)}),
            lca.morphism([ProdTorus(P)], [Torus(P)], {(0, 0): lca.ProjProd0(P)}),
        )
    if isinstance(cert, IdentityLeft):
        X = cert.X
        return X, X, ZERO_OBJECT, lca.identity(X), lca.zero_morphism(X, ZERO_OBJECT)
    if isinstance(cert, IdentityRight):
        X = cert.X
        return ZERO_OBJECT, X, X, lca.zero_morphism(ZERO_OBJECT, X), lca.identity(X)
    if isinstance(cert, ZeroSeq):
        z = ZERO_OBJECT
        return z, z, z, lca.zero_morphism(z, z), lca.zero_morphism(z, z)
    if isinstance(cert, DirectSum):
        parts = [canonical(c) for c in cert.parts]
        objs = [LcaObject(tuple(a for p in parts for a in p[k])) for k in range(3)]
        inc = lca.direct_sum_all(p[3] for p in parts)
        sur = lca.direct_sum_all(p[4] for p in parts)
        return objs[0], objs[1], objs[2], inc, sur
    if isinstance(cert, RewiredByIso):
        left, mid, right, inc, sur = canonical(cert.inner)
        j1, j, j2 = cert.left_iso, cert.mid_iso, cert.right_iso
        if (j1.source, j.source, j2.source) != (left, mid, right):
            raise TagMismatch("rewiring isomorphisms do not start at the inner sequence")
        new_inc = lca.compose_all(j, inc, _inverse_or_fail(j1, "left map"))
        new_sur = lca.compose_all(j2, sur, _inverse_or_fail(j, "middle map"))
        return j1.target, j.target, j2.target, new_inc, new_sur
    if isinstance(cert, SplitWitness):
        _check_split(cert)
        return cert.left, cert.mid, cert.right, cert.inc, cert.sur
    if isinstance(cert, QuotientCg):
        left, mid, right, inc, sur = canonical(cert.inner)
        q = lca.quotient_cg_object
        return (
            q(left), q(mid), q(right),
            lca.quotient_cg_morphism(inc), lca.quotient_cg_morphism(sur),
        )
    raise TagMismatch(f"unknown certificate {cert!r}")


def _check_split(c: SplitWitness) -> None:
    checks = [
        ("retraction . inc = 1", lca.compose(c.retraction, c.inc), lca.identity(c.left)),
        ("sur . section = 1", lca.compose(c.sur, c.section), lca.identity(c.right)),
        (
            "inc . retraction + section . sur = 1",
            lca.add(lca.compose(c.inc, c.retraction), lca.compose(c.section, c.sur)),
            lca.identity(c.mid),
        ),
    ]
    for name, lhs, rhs in checks:
        if (lhs.source, lhs.target) != (rhs.source, rhs.target) or not lca.equal_morphisms(lhs, rhs):
            raise TagMismatch(f"split witness fails: {name}")


def cert_name(cert) -> str:
    return type(cert).__name__


# ---------------------------------------------------------------------------
# Short exact and double exact sequences


@cached_hash
@dataclass(frozen=True)
class ShortExact:
    left: LcaObject
    mid: LcaObject
    right: LcaObject
    inc: LcaMorphism
    sur: LcaMorphism
    cert: object

    def objects(self) -> tuple[LcaObject, LcaObject, LcaObject]:
        return self.left, self.mid, self.right

    def validate(self) -> "ShortExact":
        _validate(self)
        return self

    def __str__(self) -> str:
        return f"{self.left} >-> {self.mid} ->> {self.right} [{cert_name(self.cert)}]"


@functools.lru_cache(maxsize=4096)
def _validate(se: ShortExact) -> None:
    if (se.inc.source, se.inc.target, se.sur.source, se.sur.target) != (
        se.left, se.mid, se.mid, se.right,
    ):
        raise EndpointMismatch(f"maps do not fit the objects of {se}")
    left, mid, right, inc, sur = canonical(se.cert)
    if (left, mid, right) != se.objects():
        raise TagMismatch(f"{cert_name(se.cert)} expects {left} >-> {mid} ->> {right}, got {se}")
    if not lca.equal_morphisms(se.inc, inc):
        raise TagMismatch(f"inclusion differs from the canonical map of {cert_name(se.cert)}")
    if not lca.equal_morphisms(se.sur, sur):
        raise TagMismatch(f"surjection differs from the canonical map of {cert_name(se.cert)}")
    if not lca.is_zero_morphism(lca.compose(se.sur, se.inc)):
        raise CompositeNotZero(f"sur . inc is not zero in {se}")


def certify_exact(left, mid, right, inc, sur, cert) -> ShortExact:
    return ShortExact(left, mid, right, inc, sur, cert).validate()


@functools.lru_cache(maxsize=1 << 14)
def exact(cert) -> ShortExact:
    """The validated sequence a certificate stands for, with normalized maps."""
    left, mid, right, inc, sur = canonical(cert)
    return certify_exact(left, mid, right, lca.normalize(inc), lca.normalize(sur), cert)


def rewire(se: ShortExact, left_iso: LcaMorphism, mid_iso: LcaMorphism, right_iso: LcaMorphism) -> ShortExact:
    return exact(RewiredByIso(se.cert, left_iso, mid_iso, right_iso))


def _scalar_iso(X: LcaObject, sign: int) -> LcaMorphism:
    return lca.identity(X) if sign == 1 else lca.neg(lca.identity(X))


def negate_inc(se: ShortExact) -> ShortExact:
    return rewire(se, _scalar_iso(se.left, -1), lca.identity(se.mid), lca.identity(se.right))


def negate_sur(se: ShortExact) -> ShortExact:
    return rewire(se, lca.identity(se.left), lca.identity(se.mid), _scalar_iso(se.right, -1))


def sum_exact(rows: Sequence[ShortExact]) -> ShortExact:
    return exact(DirectSum(tuple(r.cert for r in rows)))


@cached_hash
@dataclass(frozen=True)
class DoubleExact:
    yin: ShortExact
    yang: ShortExact

    def __post_init__(self):
        if self.yin.objects() != self.yang.objects():
            raise EndpointMismatch("Yin and Yang sequences must share their three objects")

    @property
    def left(self) -> LcaObject:
        return self.yin.left

    @property
    def mid(self) -> LcaObject:
        return self.yin.mid

    @property
    def right(self) -> LcaObject:
        return self.yin.right

    def objects(self):
        return self.yin.objects()

    def validate(self) -> "DoubleExact":
        self.yin.validate()
        self.yang.validate()
        return self

    def __str__(self) -> str:
        return f"[{self.left} >-> {self.mid} ->> {self.right}]"


def double(yin: ShortExact, yang: ShortExact | None = None) -> DoubleExact:
    return DoubleExact(yin, yin if yang is None else yang)


def zero_des() -> DoubleExact:
    z = exact(ZeroSeq())
    return DoubleExact(z, z)


def direct_sum_des(d1: DoubleExact, d2: DoubleExact) -> DoubleExact:
    return DoubleExact(sum_exact([d1.yin, d2.yin]), sum_exact([d1.yang, d2.yang]))


# ---------------------------------------------------------------------------
# Schematics


@cached_hash
@dataclass(frozen=True)
class Wiring:
    """``left: (+)A' -> (+)B'``, ``mid: (+)A -> (+)B``, ``right: (+)A'' -> (+)B''``."""

    left: LcaMorphism
    mid: LcaMorphism
    right: LcaMorphism


@cached_hash
@dataclass(frozen=True)
class Schematic:
    above: tuple[ShortExact, ...]
    below: tuple[ShortExact, ...]
    wiring: Wiring


def column_objects(rows: Sequence[ShortExact]) -> tuple[LcaObject, LcaObject, LcaObject]:
    return tuple(LcaObject(tuple(a for r in rows for a in r.objects()[k])) for k in range(3))


@functools.lru_cache(maxsize=4096)
def compile_schematic(s: Schematic) -> DoubleExact:
    """Yin is the sum of the rows above; Yang the sum below, pulled back along the wiring."""
    above = column_objects(s.above)
    below = column_objects(s.below)
    isos = (s.wiring.left, s.wiring.mid, s.wiring.right)
    for name, iso, a, b in zip(("left", "middle", "right"), isos, above, below):
        if (iso.source, iso.target) != (a, b):
            raise ColumnMismatch(
                f"{name} wiring goes {iso.source} -> {iso.target}, columns are {a} and {b}"
            )
        if not lca.is_rewiring_iso(iso):
            raise WiringNotIso(f"{name} wiring is not a signed permutation")
    for r in s.above + s.below:
        r.validate()
    yin = sum_exact(s.above)
    back = tuple(lca.transpose_signed(iso) for iso in isos)
    yang = exact(RewiredByIso(DirectSum(tuple(r.cert for r in s.below)), *back))
    return DoubleExact(yin, yang)


Keyed = Sequence[tuple[Hashable, Atom]]


def keyed_permutation(src: Keyed, tgt: Keyed, signs: dict | None = None, overrides: dict | None = None) -> LcaMorphism:
    """Signed permutation matching summands by key; null atoms are ignored.

    ``overrides`` replaces the identity block of a key by another expression
    (used for isomorphisms that are not rewirings).
    """
    src = [(k, a) for k, a in src if not a.is_null]
    tgt = [(k, a) for k, a in tgt if not a.is_null]
    pos = {}
    for j, (k, a) in enumerate(src):
        if k in pos:
            raise ColumnMismatch(f"duplicate wiring key {k!r}")
        pos[k] = j
    if len(src) != len(tgt):
        raise ColumnMismatch(f"{len(src)} summands cannot be wired to {len(tgt)}")
    ents = []
    for i, (k, b) in enumerate(tgt):
        if k not in pos:
            raise ColumnMismatch(f"wiring key {k!r} has no partner")
        j = pos[k]
        if overrides and k in overrides:
            ents.append((i, j, overrides[k]))
            continue
        if src[j][1] != b:
            raise ColumnMismatch(f"wiring key {k!r} joins {src[j][1]} to {b}")
        e = Id(b)
        if signs and signs.get(k, 1) == -1:
            e = lca.Neg(e)
        ents.append((i, j, e))
    return LcaMorphism(
        LcaObject(tuple(a for _, a in src)), LcaObject(tuple(b for _, b in tgt)), tuple(ents)
    )


@dataclass(frozen=True)
class KeyedRow:
    """A row together with a wiring key for every summand of each column."""

    seq: ShortExact
    left: tuple
    mid: tuple
    right: tuple

    def __post_init__(self):
        for keyed, obj in zip((self.left, self.mid, self.right), self.seq.objects()):
            if LcaObject(tuple(a for _, a in keyed)) != obj:
                raise ColumnMismatch(f"keys {keyed!r} do not describe {obj}")


def keyed(seq: ShortExact, left=(), mid=(), right=()) -> KeyedRow:
    return KeyedRow(seq, tuple(left), tuple(mid), tuple(right))


def keyed_schematic(above: Sequence[KeyedRow], below: Sequence[KeyedRow], signs=None) -> Schematic:
    """Schematic whose wiring joins equal keys; ``signs`` is an optional triple of {key: -1}."""
    signs = signs or ({}, {}, {})
    cols = []
    for k, name in enumerate(("left", "mid", "right")):
        src = [p for r in above for p in getattr(r, name)]
        tgt = [p for r in below for p in getattr(r, name)]
        cols.append(keyed_permutation(src, tgt, signs[k]))
    return Schematic(tuple(r.seq for r in above), tuple(r.seq for r in below), Wiring(*cols))


def rekey(row: KeyedRow, mapping: dict) -> KeyedRow:
    """Same row with wiring keys renamed."""

    def ren(col):
        return tuple((mapping.get(k, k), a) for k, a in col)

    return KeyedRow(row.seq, ren(row.left), ren(row.mid), ren(row.right))


def column_keys(rows: Sequence[KeyedRow], k: int) -> list:
    name = ("left", "mid", "right")[k]
    return [p for r in rows for p in getattr(r, name)]
