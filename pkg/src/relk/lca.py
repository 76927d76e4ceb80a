"""Formal locally compact module objects and their morphism language.

Objects are finite direct sums of five atom kinds built from a free module P:

    Disc(P)        P with the discrete topology
    Vect(P)        P_R
    Torus(P)       T_P = P_R / P
    CoprodDisc(P)  the coproduct of copies of P indexed by Z>=0
    ProdTorus(P)   the product of copies of T_P indexed by Z>=0

Morphisms are block matrices of :class:`PrimExpr` trees.  Every block lives
in a hom-group with a very small description: a single rational matrix, or a
polynomial ``sum_k M_k s^k`` in the shift for the two sequence kinds.  The
normal form of a tree is computed by reducing it to that description and
reading back a canonical tree.  ``eval`` is a separate, structural
interpreter on finitely supported elements; :func:`equal_morphisms` runs both
and treats any disagreement as a fatal engine bug.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core_algebra import FreeModule, RatMatrix
from .errors import (
    DimensionMismatch,
    ElementShapeMismatch,
    EndpointMismatch,
    NormalFormVsEvalDisagreement,
)


class Kind(str, enum.Enum):
    DISC = "Disc"
    VECT = "Vect"
    TORUS = "Torus"
    COPROD = "CoprodDisc"
    PROD = "ProdTorus"
    ZERO = "Zero"


SEQUENCE_KINDS = (Kind.COPROD, Kind.PROD)
INTEGRAL_KINDS = (Kind.DISC, Kind.TORUS, Kind.COPROD, Kind.PROD)
TORUS_VALUED = (Kind.TORUS, Kind.PROD)


def cached_hash(cls):
    """Memoize the dataclass-generated hash; values are immutable and hashed often."""
    base = cls.__hash__
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = base(self)
            self.__dict__["_hash"] = h
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or hash(self) != hash(other):
            return False
        return all(getattr(self, n) == getattr(other, n) for n in names)

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls


@cached_hash
@dataclass(frozen=True)
class Atom:
    kind: Kind
    module: FreeModule | None = None

    def __post_init__(self):
        if (self.kind is Kind.ZERO) != (self.module is None):
            raise ValueError("Zero atoms carry no module; all others need one")

    @property
    def dim(self) -> int:
        return 0 if self.module is None else self.module.dim

    @property
    def is_null(self) -> bool:
        return self.dim == 0

    def __str__(self) -> str:
        if self.kind is Kind.ZERO:
            return "0"
        p = self.module.label
        return {
            Kind.DISC: p,
            Kind.VECT: f"{p}_R",
            Kind.TORUS: f"T_{p}",
            Kind.COPROD: f"(+){p}",
            Kind.PROD: f"(x)T_{p}",
        }[self.kind]


ZERO_ATOM = Atom(Kind.ZERO)


def Disc(P: FreeModule) -> Atom:
    return Atom(Kind.DISC, P)


def Vect(P: FreeModule) -> Atom:
    return Atom(Kind.VECT, P)


def Torus(P: FreeModule) -> Atom:
    return Atom(Kind.TORUS, P)


def CoprodDisc(P: FreeModule) -> Atom:
    return Atom(Kind.COPROD, P)


def ProdTorus(P: FreeModule) -> Atom:
    return Atom(Kind.PROD, P)


@cached_hash
@dataclass(frozen=True)
class LcaObject:
    """Ordered direct sum of atoms.  Null atoms (dimension 0) are dropped."""

    atoms: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(a for a in self.atoms if not a.is_null))

    @classmethod
    def of(cls, *atoms: Atom) -> "LcaObject":
        return cls(tuple(atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __getitem__(self, i):
        return self.atoms[i]

    def __add__(self, other: "LcaObject") -> "LcaObject":
        return LcaObject(self.atoms + other.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def __str__(self) -> str:
        return " + ".join(str(a) for a in self.atoms) or "0"


ZERO_OBJECT = LcaObject()


# ---------------------------------------------------------------------------
# Expression trees


def _expr(cls):
    """Frozen dataclass with a cached structural hash (trees get hashed a lot)."""
    cls = dataclass(frozen=True, eq=False)(cls)
    names = tuple(f.name for f in fields(cls))

    def key(self):
        return (cls.__name__,) + tuple(getattr(self, n) for n in names)

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(key(self))
            self.__dict__["_h"] = h
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not cls or hash(self) != hash(other):
            return False
        return key(self) == key(other)

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls


class _Interned(type):
    """Hash-consing: structurally equal expressions are the same object."""

    def __call__(cls, *args, **kwargs):
        inst = super().__call__(*args, **kwargs)
        return _INTERN.setdefault(inst, inst)


_INTERN: dict = {}


class PrimExpr(metaclass=_Interned):
    """Base class; ``src``/``tgt`` are the endpoint atoms."""

    src: Atom
    tgt: Atom

    def __str__(self) -> str:
        return render_expr(self)


def _check_kind(a: Atom, kind: Kind, what: str):
    if a.kind is not kind:
        raise EndpointMismatch(f"{what}: expected a {kind.value} atom, got {a}")


@_expr
class ZeroMap(PrimExpr):
    src: Atom
    tgt: Atom


@_expr
class Id(PrimExpr):
    atom: Atom

    @property
    def src(self):
        return self.atom

    @property
    def tgt(self):
        return self.atom


@_expr
class Iota(PrimExpr):
    """``P -> P_R``."""

    P: FreeModule

    @property
    def src(self):
        return Disc(self.P)

    @property
    def tgt(self):
        return Vect(self.P)


@_expr
class QuotT(PrimExpr):
    """``P_R -> T_P``."""

    P: FreeModule

    @property
    def src(self):
        return Vect(self.P)

    @property
    def tgt(self):
        return Torus(self.P)


@_expr
class ShiftCoprod(PrimExpr):
    """``(p0, p1, p2, ...) -> (p1, p2, ...)``."""

    P: FreeModule

    @property
    def src(self):
        return CoprodDisc(self.P)

    @property
    def tgt(self):
        return CoprodDisc(self.P)


@_expr
class InclCoprod0(PrimExpr):
    """``p -> (p, 0, 0, ...)``."""

    P: FreeModule

    @property
    def src(self):
        return Disc(self.P)

    @property
    def tgt(self):
        return CoprodDisc(self.P)


@_expr
class ShiftProd(PrimExpr):
    """``(t0, t1, ...) -> (0, t0, t1, ...)``."""

    P: FreeModule

    @property
    def src(self):
        return ProdTorus(self.P)

    @property
    def tgt(self):
        return ProdTorus(self.P)


@_expr
class ProjProd0(PrimExpr):
    """``(t0, t1, ...) -> t0``; the cokernel of :class:`ShiftProd`."""

    P: FreeModule

    @property
    def src(self):
        return ProdTorus(self.P)

    @property
    def tgt(self):
        return Torus(self.P)


@_expr
class Mat(PrimExpr):
    """A matrix ``P -> Q`` applied on atoms of one kind (coordinatewise on sequences).

    Entries must be integral except on Vect atoms.
    """

    kind: Kind
    P: FreeModule
    Q: FreeModule
    matrix: RatMatrix

    def __post_init__(self):
        if self.kind is Kind.ZERO:
            raise EndpointMismatch("Mat on the zero atom")
        if self.matrix.shape != (self.Q.dim, self.P.dim):
            raise DimensionMismatch(
                f"Mat {self.P}->{self.Q} needs shape {(self.Q.dim, self.P.dim)}, got {self.matrix.shape}"
            )
        if self.kind in INTEGRAL_KINDS and not self.matrix.is_integral():
            raise EndpointMismatch(f"non-integral matrix on {self.kind.value} atoms")

    @property
    def src(self):
        return Atom(self.kind, self.P)

    @property
    def tgt(self):
        return Atom(self.kind, self.Q)


@_expr
class Neg(PrimExpr):
    arg: PrimExpr

    @property
    def src(self):
        return self.arg.src

    @property
    def tgt(self):
        return self.arg.tgt


@_expr
class Comp(PrimExpr):
    """``outer . inner``."""

    outer: PrimExpr
    inner: PrimExpr

    def __post_init__(self):
        if self.outer.src != self.inner.tgt:
            raise EndpointMismatch(f"cannot compose {self.outer} after {self.inner}")

    @property
    def src(self):
        return self.inner.src

    @property
    def tgt(self):
        return self.outer.tgt


@_expr
class Sum(PrimExpr):
    left: PrimExpr
    right: PrimExpr

    def __post_init__(self):
        if (self.left.src, self.left.tgt) != (self.right.src, self.right.tgt):
            raise EndpointMismatch(f"cannot add {self.left} and {self.right}")

    @property
    def src(self):
        return self.left.src

    @property
    def tgt(self):
        return self.left.tgt


def render_expr(e: PrimExpr) -> str:
    if isinstance(e, ZeroMap):
        return "0"
    if isinstance(e, Id):
        return "1"
    if isinstance(e, Iota):
        return f"iota_{e.P}"
    if isinstance(e, QuotT):
        return f"q_{e.P}"
    if isinstance(e, ShiftCoprod):
        return f"s_{e.P}"
    if isinstance(e, InclCoprod0):
        return f"in0_{e.P}"
    if isinstance(e, ShiftProd):
        return f"s'_{e.P}"
    if isinstance(e, ProjProd0):
        return f"pr0_{e.P}"
    if isinstance(e, Mat):
        body = ";".join(",".join(str(x) for x in r) for r in e.matrix.entries)
        return f"[{body}]"
    if isinstance(e, Neg):
        return f"-({render_expr(e.arg)})"
    if isinstance(e, Comp):
        return f"{render_expr(e.outer)}.{render_expr(e.inner)}"
    if isinstance(e, Sum):
        return f"({render_expr(e.left)} + {render_expr(e.right)})"
    raise TypeError(e)


# ---------------------------------------------------------------------------
# Normal form

# A block's normal data: sorted tuple of (shift, matrix) with nonzero matrices.
NormalData = tuple


def _frac_mod1(x: Fraction) -> Fraction:
    if 0 <= x < 1:
        return x
    return Fraction(x.numerator % x.denominator, x.denominator)


def _keeps_shifts(src: Atom, tgt: Atom) -> bool:
    return src.kind is tgt.kind and src.kind in SEQUENCE_KINDS


def _clean(src: Atom, tgt: Atom, terms: Mapping[int, RatMatrix]) -> NormalData:
    keep = _keeps_shifts(src, tgt)
    mod1 = src.kind is Kind.DISC and tgt.kind is Kind.TORUS
    out = []
    for k in sorted(terms):
        if k != 0 and not keep:
            continue
        m = terms[k]
        if mod1:
            m = m.map_entries(_frac_mod1)
        if not m.is_zero():
            out.append((k, m))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def normal_data(e: PrimExpr) -> NormalData:
    """Reduce ``e`` to its hom-group description."""
    src, tgt = e.src, e.tgt
    if src.is_null or tgt.is_null or isinstance(e, ZeroMap):
        return ()
    if isinstance(e, Id):
        return ((0, RatMatrix.identity(src.dim)),)
    if isinstance(e, (Iota, QuotT, InclCoprod0, ProjProd0)):
        return _clean(src, tgt, {0: RatMatrix.identity(src.dim)})
    if isinstance(e, (ShiftCoprod, ShiftProd)):
        return ((1, RatMatrix.identity(src.dim)),)
    if isinstance(e, Mat):
        return _clean(src, tgt, {0: e.matrix})
    if isinstance(e, Neg):
        return _clean(src, tgt, {k: -m for k, m in normal_data(e.arg)})
    if isinstance(e, Sum):
        acc: dict[int, RatMatrix] = dict(normal_data(e.left))
        for k, m in normal_data(e.right):
            acc[k] = acc[k] + m if k in acc else m
        return _clean(src, tgt, acc)
    if isinstance(e, Comp):
        acc = {}
        for a, ma in normal_data(e.outer):
            for b, mb in normal_data(e.inner):
                prod = ma @ mb
                acc[a + b] = acc[a + b] + prod if a + b in acc else prod
        return _clean(src, tgt, acc)
    raise TypeError(f"unknown expression {e!r}")


def _shift_power(atom: Atom, k: int) -> PrimExpr:
    gen = ShiftCoprod(atom.module) if atom.kind is Kind.COPROD else ShiftProd(atom.module)
    out = gen
    for _ in range(k - 1):
        out = Comp(gen, out)
    return out


def _mat_or_id(kind: Kind, a: Atom, b: Atom, m: RatMatrix) -> PrimExpr | None:
    """``None`` stands for an identity that can be dropped from a composite."""
    if a.module == b.module and m.is_identity():
        return None
    return Mat(kind, a.module, b.module, m)


def _then(outer: PrimExpr | None, inner: PrimExpr | None) -> PrimExpr | None:
    if outer is None:
        return inner
    if inner is None:
        return outer
    return Comp(outer, inner)


def readback(src: Atom, tgt: Atom, data: NormalData) -> PrimExpr:
    """Canonical tree for given normal data."""
    if not data:
        return ZeroMap(src, tgt)
    ks, kt = src.kind, tgt.kind
    if ks is kt:
        terms = []
        for k, m in data:
            core = _mat_or_id(ks, src, tgt, m)
            shift = _shift_power(src, k) if k else None
            term = _then(core, shift)
            terms.append(term if term is not None else Id(src))
        out = terms[0]
        for t in terms[1:]:
            out = Sum(out, t)
        return out
    ((_, m),) = data
    if (ks, kt) == (Kind.DISC, Kind.VECT):
        return _then(_mat_or_id(Kind.VECT, Vect(src.module), tgt, m), Iota(src.module))
    if (ks, kt) == (Kind.VECT, Kind.TORUS):
        return _then(QuotT(tgt.module), _mat_or_id(Kind.VECT, src, Vect(tgt.module), m))
    if (ks, kt) == (Kind.DISC, Kind.TORUS):
        lin = Mat(Kind.VECT, src.module, tgt.module, m)
        return Comp(QuotT(tgt.module), Comp(lin, Iota(src.module)))
    if (ks, kt) == (Kind.DISC, Kind.COPROD):
        return _then(InclCoprod0(tgt.module), _mat_or_id(Kind.DISC, src, Disc(tgt.module), m))
    if (ks, kt) == (Kind.PROD, Kind.TORUS):
        return _then(_mat_or_id(Kind.TORUS, Torus(src.module), tgt, m), ProjProd0(src.module))
    raise EndpointMismatch(f"no morphisms {src} -> {tgt} in the generated language")


def normalize_expr(e: PrimExpr) -> PrimExpr:
    return readback(e.src, e.tgt, normal_data(e))


@functools.lru_cache(maxsize=None)
def shift_depth(e: PrimExpr) -> int:
    """Upper bound for the shift powers a tree can produce."""
    if isinstance(e, (ShiftCoprod, ShiftProd)):
        return 1
    if isinstance(e, Neg):
        return shift_depth(e.arg)
    if isinstance(e, Comp):
        return shift_depth(e.outer) + shift_depth(e.inner)
    if isinstance(e, Sum):
        return max(shift_depth(e.left), shift_depth(e.right))
    return 0


# ---------------------------------------------------------------------------
# Element-level evaluation (the independent oracle)

_Z = Fraction(0)


def _vec_mod1(v):
    return tuple(_frac_mod1(x) for x in v)


def _trim(seq):
    seq = list(seq)
    while seq and all(x == 0 for x in seq[-1]):
        seq.pop()
    return tuple(seq)


def zero_value(a: Atom):
    if a.kind in SEQUENCE_KINDS or a.kind is Kind.ZERO:
        return ()
    return (_Z,) * a.dim


def _add_values(a: Atom, x, y):
    if a.kind in SEQUENCE_KINDS:
        n = max(len(x), len(y))
        zero = (_Z,) * a.dim
        x = tuple(x) + (zero,) * (n - len(x))
        y = tuple(y) + (zero,) * (n - len(y))
        out = [tuple(p + q for p, q in zip(u, v)) for u, v in zip(x, y)]
        if a.kind is Kind.PROD:
            out = [_vec_mod1(v) for v in out]
        return _trim(out)
    out = tuple(p + q for p, q in zip(x, y))
    return _vec_mod1(out) if a.kind is Kind.TORUS else out


def _neg_value(a: Atom, x):
    if a.kind in SEQUENCE_KINDS:
        out = [tuple(-p for p in v) for v in x]
        if a.kind is Kind.PROD:
            out = [_vec_mod1(v) for v in out]
        return _trim(out)
    out = tuple(-p for p in x)
    return _vec_mod1(out) if a.kind is Kind.TORUS else out


@functools.lru_cache(maxsize=1 << 16)
def eval_expr(e: PrimExpr, x):
    """Evaluate a tree on a single-atom value by structural recursion."""
    if isinstance(e, ZeroMap):
        return zero_value(e.tgt)
    if isinstance(e, Id):
        return x
    if isinstance(e, Iota):
        return tuple(Fraction(v) for v in x)
    if isinstance(e, QuotT):
        return _vec_mod1(x)
    if isinstance(e, ShiftCoprod):
        return tuple(x[1:])
    if isinstance(e, InclCoprod0):
        return _trim((tuple(x),))
    if isinstance(e, ShiftProd):
        return _trim(((_Z,) * e.P.dim,) + tuple(x)) if x else ()
    if isinstance(e, ProjProd0):
        return tuple(x[0]) if x else (_Z,) * e.P.dim
    if isinstance(e, Mat):
        m = e.matrix
        if e.kind in (Kind.DISC, Kind.VECT):
            return m.apply(x)
        if e.kind is Kind.TORUS:
            return _vec_mod1(m.apply(x))
        if e.kind is Kind.COPROD:
            return _trim(m.apply(v) for v in x)
        return _trim(_vec_mod1(m.apply(v)) for v in x)
    if isinstance(e, Neg):
        return _neg_value(e.tgt, eval_expr(e.arg, x))
    if isinstance(e, Comp):
        return eval_expr(e.outer, eval_expr(e.inner, x))
    if isinstance(e, Sum):
        return _add_values(e.tgt, eval_expr(e.left, x), eval_expr(e.right, x))
    raise TypeError(f"unknown expression {e!r}")


def check_value(a: Atom, x) -> None:
    def vec_ok(v, integral):
        return (
            len(v) == a.dim
            and all(isinstance(t, (int, Fraction)) for t in v)
            and (not integral or all(Fraction(t).denominator == 1 for t in v))
        )

    def torus_ok(v):
        return vec_ok(v, False) and all(0 <= t < 1 for t in v)

    k = a.kind
    ok = {
        Kind.DISC: lambda: vec_ok(x, True),
        Kind.VECT: lambda: vec_ok(x, False),
        Kind.TORUS: lambda: torus_ok(x),
        Kind.COPROD: lambda: all(vec_ok(v, True) for v in x),
        Kind.PROD: lambda: all(torus_ok(v) for v in x),
        Kind.ZERO: lambda: x == (),
    }[k]()
    if not ok:
        raise ElementShapeMismatch(f"{x!r} is not an element of {a}")


@dataclass(frozen=True)
class LcaElement:
    obj: LcaObject
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.obj):
            raise ElementShapeMismatch(f"{len(self.values)} values for {len(self.obj)} summands")
        vals = []
        for a, x in zip(self.obj, self.values):
            if a.kind in SEQUENCE_KINDS:
                x = _trim(tuple(Fraction(t) for t in v) for v in x)
            else:
                x = tuple(Fraction(t) for t in x)
            check_value(a, x)
            vals.append(x)
        object.__setattr__(self, "values", tuple(vals))


# ---------------------------------------------------------------------------
# Block-matrix morphisms


@cached_hash
@dataclass(frozen=True)
class LcaMorphism:
    """``blocks`` maps (target index, source index) to a non-zero-labelled tree."""

    source: LcaObject
    target: LcaObject
    entries: tuple[tuple[int, int, PrimExpr], ...] = ()

    def __post_init__(self):
        ents = []
        seen = set()
        for i, j, e in self.entries:
            if (i, j) in seen:
                raise EndpointMismatch(f"duplicate block ({i}, {j})")
            seen.add((i, j))
            if not (0 <= i < len(self.target) and 0 <= j < len(self.source)):
                raise EndpointMismatch(f"block ({i}, {j}) out of range")
            if e.src != self.source[j] or e.tgt != self.target[i]:
                raise EndpointMismatch(
                    f"block ({i}, {j}) is {e.src} -> {e.tgt}, expected {self.source[j]} -> {self.target[i]}"
                )
            if not isinstance(e, ZeroMap):
                ents.append((i, j, e))
        object.__setattr__(self, "entries", tuple(sorted(ents, key=lambda t: (t[0], t[1]))))

    @functools.cached_property
    def blocks(self) -> dict[tuple[int, int], PrimExpr]:
        return {(i, j): e for i, j, e in self.entries}

    def block(self, i: int, j: int) -> PrimExpr:
        e = self.blocks.get((i, j))
        return e if e is not None else ZeroMap(self.source[j], self.target[i])

    def column(self, j: int) -> list[tuple[int, PrimExpr]]:
        return [(i, e) for (i, jj, e) in self.entries if jj == j]

    def __str__(self) -> str:
        body = ", ".join(f"({i},{j}):{render_expr(e)}" for i, j, e in self.entries)
        return f"{self.source} -> {self.target} {{{body}}}"


def morphism(
    source: Sequence[Atom] | LcaObject,
    target: Sequence[Atom] | LcaObject,
    blocks: Mapping[tuple[int, int], PrimExpr] | None = None,
) -> LcaMorphism:
    """Build a morphism from atom lists that may contain null atoms.

    Block indices refer to the given lists; blocks touching null atoms are
    dropped together with the atoms.
    """
    src = list(source)
    tgt = list(target)
    smap = {j: n for n, j in enumerate(j for j, a in enumerate(src) if not a.is_null)}
    tmap = {i: n for n, i in enumerate(i for i, a in enumerate(tgt) if not a.is_null)}
    ents = []
    for (i, j), e in (blocks or {}).items():
        if e.src != src[j] or e.tgt != tgt[i]:
            raise EndpointMismatch(f"block ({i}, {j}) is {e.src} -> {e.tgt}, expected {src[j]} -> {tgt[i]}")
        if i in tmap and j in smap:
            ents.append((tmap[i], smap[j], e))
    return LcaMorphism(LcaObject(tuple(src)), LcaObject(tuple(tgt)), tuple(ents))


def single(e: PrimExpr) -> LcaMorphism:
    return morphism([e.src], [e.tgt], {(0, 0): e})


def identity(obj: LcaObject) -> LcaMorphism:
    return LcaMorphism(obj, obj, tuple((i, i, Id(a)) for i, a in enumerate(obj)))


def zero_morphism(source: LcaObject, target: LcaObject) -> LcaMorphism:
    return LcaMorphism(source, target, ())


def compose(f: LcaMorphism, g: LcaMorphism) -> LcaMorphism:
    """``f . g`` with raw Comp/Sum nodes (call :func:`normalize` to canonicalize)."""
    if g.target != f.source:
        raise EndpointMismatch(f"cannot compose: {g.target} vs {f.source}")
    by_src: dict[int, list[tuple[int, PrimExpr]]] = {}
    for i, j, e in f.entries:
        by_src.setdefault(j, []).append((i, e))
    acc: dict[tuple[int, int], PrimExpr] = {}
    for j, k, ge in g.entries:
        for i, fe in by_src.get(j, ()):
            term = Comp(fe, ge)
            acc[(i, k)] = Sum(acc[(i, k)], term) if (i, k) in acc else term
    return LcaMorphism(g.source, f.target, tuple((i, k, e) for (i, k), e in acc.items()))


def compose_all(*fs: LcaMorphism) -> LcaMorphism:
    """``fs[0] . fs[1] . ...``, normalizing after each step."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = normalize(compose(f, out))
    return out


def add(f: LcaMorphism, g: LcaMorphism) -> LcaMorphism:
    if (f.source, f.target) != (g.source, g.target):
        raise EndpointMismatch("cannot add morphisms with different endpoints")
    acc = dict(f.blocks)
    for (i, j), e in g.blocks.items():
        acc[(i, j)] = Sum(acc[(i, j)], e) if (i, j) in acc else e
    return LcaMorphism(f.source, f.target, tuple((i, j, e) for (i, j), e in acc.items()))


def neg(f: LcaMorphism) -> LcaMorphism:
    return LcaMorphism(f.source, f.target, tuple((i, j, Neg(e)) for i, j, e in f.entries))


def direct_sum(f: LcaMorphism, g: LcaMorphism) -> LcaMorphism:
    ni, nj = len(f.target), len(f.source)
    ents = list(f.entries) + [(i + ni, j + nj, e) for i, j, e in g.entries]
    return LcaMorphism(f.source + g.source, f.target + g.target, tuple(ents))


def direct_sum_all(fs: Iterable[LcaMorphism]) -> LcaMorphism:
    out = zero_morphism(LcaObject(), LcaObject())
    for f in fs:
        out = direct_sum(out, f)
    return out


@functools.lru_cache(maxsize=1 << 14)
def normalize(f: LcaMorphism) -> LcaMorphism:
    ents = []
    for i, j, e in f.entries:
        n = normalize_expr(e)
        if not isinstance(n, ZeroMap):
            ents.append((i, j, n))
    return LcaMorphism(f.source, f.target, tuple(ents))


def normal_blocks(f: LcaMorphism) -> dict[tuple[int, int], NormalData]:
    out = {}
    for i, j, e in f.entries:
        d = normal_data(e)
        if d:
            out[(i, j)] = d
    return out


def eval_morphism(f: LcaMorphism, x: LcaElement) -> LcaElement:
    if x.obj != f.source:
        raise ElementShapeMismatch(f"element of {x.obj} fed to a morphism from {f.source}")
    out = [zero_value(a) for a in f.target]
    for i, j, e in f.entries:
        out[i] = _add_values(f.target[i], out[i], eval_expr(e, x.values[j]))
    return LcaElement(f.target, tuple(out))


# ---------------------------------------------------------------------------
# Equality with cross-check

GENERIC_SCALE = Fraction(1, 10007)

disagreement_events = 0


def _samples(a: Atom, depth: int):
    n = a.dim
    basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    if a.kind is Kind.DISC:
        return basis
    if a.kind in (Kind.VECT, Kind.TORUS):
        return [tuple(GENERIC_SCALE * t for t in v) for v in basis]
    zero = (_Z,) * n
    vals = basis if a.kind is Kind.COPROD else [tuple(GENERIC_SCALE * t for t in v) for v in basis]
    return [(zero,) * k + (v,) for k in range(depth + 1) for v in vals]


@dataclass(frozen=True)
class Equality:
    """Outcome of :func:`equal_morphisms`; truthy iff the morphisms agree."""

    equal: bool
    samples: int
    differing_block: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.equal


@functools.lru_cache(maxsize=1 << 14)
def equal_morphisms(f: LcaMorphism, g: LcaMorphism) -> Equality:
    if (f.source, f.target) != (g.source, g.target):
        raise EndpointMismatch(f"{f.source}->{f.target} vs {g.source}->{g.target}")
    nf, ng = normal_blocks(f), normal_blocks(g)
    nf_equal = nf == ng
    differing = None
    if not nf_equal:
        differing = min(k for k in set(nf) | set(ng) if nf.get(k) != ng.get(k))
    depth = 1
    for h in (f, g):
        for _, _, e in h.entries:
            depth = max(depth, 1 + shift_depth(e))
    fcols: dict[int, list] = {}
    gcols: dict[int, list] = {}
    for i, j, e in f.entries:
        fcols.setdefault(j, []).append((i, e))
    for i, j, e in g.entries:
        gcols.setdefault(j, []).append((i, e))
    eval_equal = True
    count = 0
    for j, a in enumerate(f.source):
        fc, gc = fcols.get(j, []), gcols.get(j, [])
        if not fc and not gc:
            continue
        rows = sorted({i for i, _ in fc} | {i for i, _ in gc})
        for x in _samples(a, depth):
            count += 1
            fv = {i: zero_value(f.target[i]) for i in rows}
            gv = dict(fv)
            for i, e in fc:
                fv[i] = _add_values(f.target[i], fv[i], eval_expr(e, x))
            for i, e in gc:
                gv[i] = _add_values(f.target[i], gv[i], eval_expr(e, x))
            if fv != gv:
                eval_equal = False
                break
        if not eval_equal:
            break
    if nf_equal != eval_equal:
        global disagreement_events
        disagreement_events += 1
        raise NormalFormVsEvalDisagreement(
            f"normal forms say {nf_equal}, evaluation says {eval_equal} for {f} vs {g}"
        )
    return Equality(nf_equal, count, differing)


def is_zero_morphism(f: LcaMorphism) -> Equality:
    return equal_morphisms(f, zero_morphism(f.source, f.target))


# ---------------------------------------------------------------------------
# Isomorphisms


def _signed_identity(d: NormalData, n: int) -> int:
    if len(d) != 1 or d[0][0] != 0:
        return 0
    m = d[0][1]
    if m == RatMatrix.identity(n):
        return 1
    if m == RatMatrix.scalar(n, -1):
        return -1
    return 0


def is_rewiring_iso(f: LcaMorphism) -> bool:
    """Signed permutation of identical atoms."""
    if len(f.source) != len(f.target):
        return False
    nb = normal_blocks(f)
    rows, cols = set(), set()
    for (i, j), d in nb.items():
        if f.source[j] != f.target[i] or not _signed_identity(d, f.source[j].dim):
            return False
        if i in rows or j in cols:
            return False
        rows.add(i)
        cols.add(j)
    return len(rows) == len(f.target) and len(cols) == len(f.source)


def try_inverse(f: LcaMorphism) -> LcaMorphism | None:
    """Inverse of a monomial block matrix of invertible same-kind blocks, else None."""
    if len(f.source) != len(f.target):
        return None
    nb = normal_blocks(f)
    rows, cols = set(), set()
    ents = []
    for (i, j), d in nb.items():
        a, b = f.source[j], f.target[i]
        if a.kind is not b.kind or a.dim != b.dim or len(d) != 1 or d[0][0] != 0:
            return None
        if i in rows or j in cols:
            return None
        rows.add(i)
        cols.add(j)
        m = d[0][1]
        if m.det() == 0:
            return None
        inv = m.inverse()
        if a.kind in INTEGRAL_KINDS and not inv.is_integral():
            return None
        ents.append((j, i, readback(b, a, ((0, inv),))))
    if len(rows) != len(f.target):
        return None
    return LcaMorphism(f.target, f.source, tuple(ents))


def permutation(source: LcaObject, target_order: Sequence[int], signs: Sequence[int] | None = None) -> LcaMorphism:
    """Morphism sending source summand ``target_order[i]`` to target position ``i``."""
    tgt = LcaObject(tuple(source[j] for j in target_order))
    ents = []
    for i, j in enumerate(target_order):
        s = 1 if signs is None else signs[i]
        ents.append((i, j, Id(source[j]) if s == 1 else Neg(Id(source[j]))))
    return LcaMorphism(source, tgt, tuple(ents))


def transpose_signed(f: LcaMorphism) -> LcaMorphism:
    """Inverse of a signed permutation."""
    return LcaMorphism(f.target, f.source, tuple((j, i, e) for i, j, e in f.entries))


# ---------------------------------------------------------------------------
# Quotient by compactly generated objects

CG_KILLED = (Kind.DISC, Kind.VECT, Kind.TORUS, Kind.PROD)


def quotient_cg_object(x: LcaObject) -> LcaObject:
    return LcaObject(tuple(a for a in x if a.kind not in CG_KILLED))


def quotient_cg_morphism(f: LcaMorphism) -> LcaMorphism:
    """Drop every block that touches a killed atom.

    In the generated language no morphism leaves a CoprodDisc atom except into
    another one, so this is a functor.
    """
    keep_s = [j for j, a in enumerate(f.source) if a.kind not in CG_KILLED]
    keep_t = [i for i, a in enumerate(f.target) if a.kind not in CG_KILLED]
    smap = {j: n for n, j in enumerate(keep_s)}
    tmap = {i: n for n, i in enumerate(keep_t)}
    ents = tuple((tmap[i], smap[j], e) for i, j, e in f.entries if i in tmap and j in smap)
    return LcaMorphism(quotient_cg_object(f.source), quotient_cg_object(f.target), ents)
