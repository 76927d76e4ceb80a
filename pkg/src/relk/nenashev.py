"""Relations between double exact sequences and replayable proof scripts.

A relation is a dict from generator key to integer coefficient, read as
``sum(c * [d]) = 0``.  Generator keys come from :func:`relk.codec.des_key`.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import lca, sequences as sq
from .codec import des_key, encode_morphism, encode_object
from .errors import (
    ColNotExact,
    DecompositionInvalid,
    EndpointMismatch,
    MissingDecomposition,
    NotAutomorphism,
    NotIso,
    RelkError,
    RowNotExact,
    StepInvalid,
    YangDiagramNotCommuting,
    YinDiagramNotCommuting,
    YinYangDiffer,
)
from .lca import Kind, LcaMorphism, LcaObject, cached_hash
from .sequences import DoubleExact, IdentityLeft, IdentityRight, RewiredByIso, ShortExact

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Relations and derivations


def _clean(rel: dict) -> dict:
    return {k: v for k, v in rel.items() if v != 0}


def rel_add(*terms: tuple[int, dict]) -> dict:
    out: dict[str, int] = {}
    for c, rel in terms:
        for k, v in rel.items():
            out[k] = out.get(k, 0) + c * v
    return _clean(out)


@dataclass
class Derivation:
    """``sum(identity[k] * [generators[k]]) = 0``, with the admitted rule instances used."""

    generators: dict[str, DoubleExact]
    identity: dict[str, int]
    admitted_rules: list[dict] = field(default_factory=list)

    def coefficient(self, d: DoubleExact) -> int:
        return self.identity.get(des_key(d), 0)

    def matches(self, terms: Sequence[tuple[int, DoubleExact]]) -> bool:
        """Does the identity equal ``sum(c * [d]) = 0`` up to an overall sign?"""
        want = rel_add(*((c, {des_key(d): 1}) for c, d in terms))
        neg = {k: -v for k, v in want.items()}
        return self.identity in (want, neg)


# ---------------------------------------------------------------------------
# The zero rule and the 3x3 rule


def check_zero_rule(d: DoubleExact) -> Derivation:
    d.validate()
    for name, a, b in (("inclusions", d.yin.inc, d.yang.inc), ("surjections", d.yin.sur, d.yang.sur)):
        if not lca.equal_morphisms(a, b):
            raise YinYangDiffer(f"Yin and Yang {name} differ")
    return Derivation({des_key(d): d}, {des_key(d): 1})


@cached_hash
@dataclass(frozen=True)
class Nen33:
    """Nine objects given by three row and three column double exact sequences."""

    rows: tuple[DoubleExact, DoubleExact, DoubleExact]
    cols: tuple[DoubleExact, DoubleExact, DoubleExact]

    def obj(self, i: int, j: int) -> LcaObject:
        return self.rows[i].objects()[j]

    def relation(self) -> dict:
        r, c = self.rows, self.cols
        signs = [(1, r[0]), (-1, r[1]), (1, r[2]), (-1, c[0]), (1, c[1]), (-1, c[2])]
        return rel_add(*((s, {des_key(d): 1}) for s, d in signs))

    def generators(self) -> dict:
        return {des_key(d): d for d in self.rows + self.cols}


def _side(d: DoubleExact, yang: bool) -> ShortExact:
    return d.yang if yang else d.yin


def check_33(n: Nen33) -> Derivation:
    if len(n.rows) != 3 or len(n.cols) != 3:
        raise RowNotExact("a 3x3 diagram needs three rows and three columns")
    for j, col in enumerate(n.cols):
        for i in range(3):
            if col.objects()[i] != n.obj(i, j):
                raise ColNotExact(f"column {j + 1} entry {i + 1} is {col.objects()[i]}, row says {n.obj(i, j)}")
    for i, row in enumerate(n.rows):
        try:
            row.validate()
        except RelkError as exc:
            raise RowNotExact(f"row {i + 1}: {exc}") from exc
    for j, col in enumerate(n.cols):
        try:
            col.validate()
        except RelkError as exc:
            raise ColNotExact(f"column {j + 1}: {exc}") from exc
    for yang, err in ((False, YinDiagramNotCommuting), (True, YangDiagramNotCommuting)):
        for i in range(2):
            for j in range(2):
                h_top = _side(n.rows[i], yang)
                h_bot = _side(n.rows[i + 1], yang)
                v_l = _side(n.cols[j], yang)
                v_r = _side(n.cols[j + 1], yang)
                h1 = h_top.inc if j == 0 else h_top.sur
                h2 = h_bot.inc if j == 0 else h_bot.sur
                v1 = v_l.inc if i == 0 else v_l.sur
                v2 = v_r.inc if i == 0 else v_r.sur
                if not lca.equal_morphisms(lca.compose(v2, h1), lca.compose(h2, v1)):
                    raise err(f"square ({i + 1},{j + 1}) does not commute")
    return Derivation(n.generators(), n.relation())


# ---------------------------------------------------------------------------
# Building blocks for derived rules


@functools.lru_cache(maxsize=1 << 14)
def onto_iso_column(X: LcaObject, x: LcaMorphism, x_yang: LcaMorphism | None = None) -> DoubleExact:
    """``X -> Y -> 0`` with inclusion ``x`` on Yin and ``x_yang`` (default ``x``) on Yang."""
    base = IdentityLeft(X)
    zero = lca.identity(lca.ZERO_OBJECT)
    yin = sq.exact(RewiredByIso(base, lca.identity(X), x, zero))
    if x_yang is None or x_yang == x:
        return DoubleExact(yin, yin)
    return DoubleExact(yin, sq.exact(RewiredByIso(base, lca.identity(X), x_yang, zero)))


def _require_iso(x: LcaMorphism, what: str) -> None:
    if lca.try_inverse(x) is None:
        raise NotIso(f"{what} is not an isomorphism")


def double_iso_nen33(d1: DoubleExact, d2: DoubleExact, xs: Sequence[LcaMorphism]) -> Nen33:
    for j, x in enumerate(xs):
        if (x.source, x.target) != (d1.objects()[j], d2.objects()[j]):
            raise EndpointMismatch(f"map {j + 1} does not go between the matching objects")
        _require_iso(x, f"map {j + 1}")
    cols = tuple(onto_iso_column(d1.objects()[j], xs[j]) for j in range(3))
    return Nen33((d1, d2, sq.zero_des()), cols)


def double_iso_rule(d1: DoubleExact, d2: DoubleExact, x1: LcaMorphism, x: LcaMorphism, x2: LcaMorphism) -> Derivation:
    n = double_iso_nen33(d1, d2, (x1, x, x2))
    check_33(n)
    for c in n.cols + (n.rows[2],):
        check_zero_rule(c)
    rel = rel_add((1, {des_key(d1): 1}), (-1, {des_key(d2): 1}))
    return Derivation({des_key(d1): d1, des_key(d2): d2}, rel)


def split_column(X1: LcaObject, X2: LcaObject) -> DoubleExact:
    """``X1 -> X1 + X2 -> X2`` with the evident maps on both sides."""
    c = sq.exact(sq.DirectSum((IdentityLeft(X1), IdentityRight(X2))))
    return DoubleExact(c, c)


def additivity_nen33(d1: DoubleExact, d2: DoubleExact) -> Nen33:
    cols = tuple(split_column(d1.objects()[j], d2.objects()[j]) for j in range(3))
    return Nen33((d1, sq.direct_sum_des(d1, d2), d2), cols)


def automorphism_left(X: LcaObject, phi: LcaMorphism) -> DoubleExact:
    """``X -> X -> 0`` with inclusion 1 on Yin and ``phi`` on Yang."""
    return onto_iso_column(X, lca.identity(X), phi)


def automorphism_right(X: LcaObject, phi: LcaMorphism) -> DoubleExact:
    """``0 -> X -> X`` with surjection ``phi`` on Yin and 1 on Yang."""
    base = IdentityRight(X)
    z = lca.identity(lca.ZERO_OBJECT)
    yin = sq.exact(RewiredByIso(base, z, lca.identity(X), phi))
    return DoubleExact(yin, sq.exact(base))


def swap_morphism(X: LcaObject, signed: bool = False) -> LcaMorphism:
    """``(x, y) -> (y, x)`` on ``X + X``, or ``(y, -x)`` when signed."""
    n = len(X)
    XX = X + X
    ents = []
    for i, a in enumerate(X):
        ents.append((i, n + i, lca.Id(a)))
        ents.append((n + i, i, lca.Neg(lca.Id(a)) if signed else lca.Id(a)))
    return LcaMorphism(XX, XX, tuple(ents))


def swap_des(X: LcaObject, signed: bool = False) -> DoubleExact:
    return automorphism_left(X + X, swap_morphism(X, signed))


PURITY = {
    Kind.TORUS: "compact",
    Kind.PROD: "compact",
    Kind.DISC: "discrete",
    Kind.COPROD: "discrete",
    Kind.VECT: "vector",
}

JUSTIFICATION = {
    "compact": "swindle in compact objects (closed under products)",
    "discrete": "swindle in discrete objects (closed under coproducts)",
    "vector": "image of a swap of projective modules",
    "zero": "zero object",
}


def purity(X: LcaObject) -> str | None:
    kinds = {PURITY[a.kind] for a in X}
    if not kinds:
        return "zero"
    return kinds.pop() if len(kinds) == 1 else None


# ---------------------------------------------------------------------------
# Proof script steps


@dataclass(frozen=True)
class ZeroRule:
    des: DoubleExact


@dataclass(frozen=True)
class ThreeByThree:
    diagram: Nen33


@dataclass(frozen=True)
class DoubleIso:
    d1: DoubleExact
    d2: DoubleExact
    x_left: LcaMorphism
    x_mid: LcaMorphism
    x_right: LcaMorphism


@dataclass(frozen=True)
class LeftRightSwap:
    X: LcaObject
    phi: LcaMorphism


@dataclass(frozen=True)
class SwapVanish:
    X: LcaObject
    signed: bool = False
    decomposition: ShortExact | None = None


@dataclass(frozen=True)
class LinearCombine:
    refs: tuple[int, ...]
    coeffs: tuple[int, ...]


Step = ZeroRule | ThreeByThree | DoubleIso | LeftRightSwap | SwapVanish | LinearCombine


@dataclass(frozen=True)
class ProofScript:
    steps: tuple
    name: str = ""


def step_relation(step, prior: Sequence[dict] = ()) -> dict:
    """The relation a step asserts, computed without validating it."""
    if isinstance(step, ZeroRule):
        return {des_key(step.des): 1}
    if isinstance(step, ThreeByThree):
        return step.diagram.relation()
    if isinstance(step, DoubleIso):
        return rel_add((1, {des_key(step.d1): 1}), (-1, {des_key(step.d2): 1}))
    if isinstance(step, LeftRightSwap):
        left = automorphism_left(step.X, step.phi)
        right = automorphism_right(step.X, step.phi)
        return rel_add((1, {des_key(left): 1}), (-1, {des_key(right): 1}))
    if isinstance(step, SwapVanish):
        return {des_key(swap_des(step.X, step.signed)): 1}
    if isinstance(step, LinearCombine):
        return rel_add(*((c, prior[r]) for r, c in zip(step.refs, step.coeffs)))
    raise TypeError(f"unknown step {step!r}")


def step_generators(step) -> dict:
    if isinstance(step, ZeroRule):
        return {des_key(step.des): step.des}
    if isinstance(step, ThreeByThree):
        return step.diagram.generators()
    if isinstance(step, DoubleIso):
        return {des_key(step.d1): step.d1, des_key(step.d2): step.d2}
    if isinstance(step, LeftRightSwap):
        ds = (automorphism_left(step.X, step.phi), automorphism_right(step.X, step.phi))
        return {des_key(d): d for d in ds}
    if isinstance(step, SwapVanish):
        d = swap_des(step.X, step.signed)
        return {des_key(d): d}
    return {}


def _admit_left_right(step: LeftRightSwap) -> dict:
    phi = step.phi
    if (phi.source, phi.target) != (step.X, step.X) or lca.try_inverse(phi) is None:
        raise NotAutomorphism("left-right swap needs an automorphism of X")
    return {"rule": "LeftRightSwap", "object": encode_object(step.X), "phi": encode_morphism(lca.normalize(phi))}


def swap_split_steps(b: "ScriptBuilder", X: LcaObject, signed: bool) -> None:
    """Add steps showing ``[s_X]`` is the sum of ``[s_a]`` over the atoms ``a`` of X."""
    atoms = list(X)
    if len(atoms) <= 1:
        return
    n = len(atoms)
    # (X + X) -> (a1 + a1) + (a2 + a2) + ...
    order = [k for i in range(n) for k in (i, n + i)]
    pi = lca.permutation(X + X, order)
    parts = [swap_des(LcaObject.of(a), signed) for a in atoms]
    target = parts[0]
    for p in parts[1:]:
        target = sq.direct_sum_des(target, p)
    z = lca.identity(lca.ZERO_OBJECT)
    b.add(DoubleIso(swap_des(X, signed), target, pi, pi, z))
    acc = parts[0]
    for p in parts[1:]:
        b.additivity(acc, p)
        acc = sq.direct_sum_des(acc, p)


def _validate_decomposition(X: LcaObject, dec: ShortExact) -> tuple[LcaObject, LcaObject]:
    dec.validate()
    if dec.mid != X:
        raise DecompositionInvalid(f"decomposition has middle {dec.mid}, expected {X}")
    if purity(dec.left) not in ("compact", "zero"):
        raise DecompositionInvalid(f"kernel {dec.left} is not compact")
    if any(PURITY[a.kind] == "compact" for a in dec.right):
        raise DecompositionInvalid(f"quotient {dec.right} is not a vector plus discrete object")
    return dec.left, dec.right


def swap_vanish_script(X: LcaObject, signed: bool, dec: ShortExact) -> ProofScript:
    """The 3x3 diagram S/S/0 for a decomposition ``C -> X -> V + D``, then atomwise swaps."""
    C, VD = _validate_decomposition(X, dec)
    S = sq.direct_sum_des(sq.double(dec), sq.double(dec))
    cols = tuple(swap_des(O, signed) for O in (C, X, VD))
    b = ScriptBuilder()
    b.add(ThreeByThree(Nen33((S, S, sq.zero_des()), cols)))
    b.add(ZeroRule(sq.zero_des()))
    for O in (C, VD):
        swap_split_steps(b, O, signed)
        for a in O:
            b.add(SwapVanish(LcaObject.of(a), signed))
        if O.is_zero:
            b.add(SwapVanish(O, signed))
    return b.conclude({des_key(swap_des(X, signed)): 1}, name="swap-vanish")


def swap_vanish(X: LcaObject, signed: bool = False, decomposition: ShortExact | None = None) -> Derivation:
    return replay(ProofScript((SwapVanish(X, signed, decomposition),)))


def left_right_swap(X: LcaObject, phi: LcaMorphism) -> Derivation:
    return replay(ProofScript((LeftRightSwap(X, phi),)))


def _validate_step(step, prior: Sequence[dict]) -> list[dict]:
    """Re-check one step; returns admitted rule records."""
    if isinstance(step, ZeroRule):
        check_zero_rule(step.des)
    elif isinstance(step, ThreeByThree):
        check_33(step.diagram)
    elif isinstance(step, DoubleIso):
        double_iso_rule(step.d1, step.d2, step.x_left, step.x_mid, step.x_right)
    elif isinstance(step, LeftRightSwap):
        return [_admit_left_right(step)]
    elif isinstance(step, SwapVanish):
        kind = purity(step.X)
        if kind is not None and step.decomposition is None:
            return [{
                "rule": "SwapVanish", "object": encode_object(step.X), "signed": step.signed,
                "tag": kind, "justification": JUSTIFICATION[kind],
            }]
        if step.decomposition is None:
            raise MissingDecomposition(f"{step.X} mixes atom kinds; supply C -> X -> V + D")
        sub = replay(swap_vanish_script(step.X, step.signed, step.decomposition))
        if sub.identity != step_relation(step):
            raise DecompositionInvalid("decomposition does not yield the swap relation")
        return sub.admitted_rules
    elif isinstance(step, LinearCombine):
        if len(step.refs) != len(step.coeffs):
            raise StepInvalid(-1, "refs and coefficients differ in length")
        if any(not 0 <= r < len(prior) for r in step.refs):
            raise StepInvalid(-1, "combination refers to a later or missing step")
    else:
        raise TypeError(f"unknown step {step!r}")
    return []


def replay(script: ProofScript) -> Derivation:
    rels: list[dict] = []
    gens: dict[str, DoubleExact] = {}
    admitted: list[dict] = []
    for i, step in enumerate(script.steps):
        try:
            admitted.extend(_validate_step(step, rels))
            rels.append(step_relation(step, rels))
        except StepInvalid as exc:
            raise StepInvalid(i, exc.reason) from exc
        except RelkError as exc:
            raise StepInvalid(i, str(exc)) from exc
        gens.update(step_generators(step))
        log.debug("step %d %s ok", i, type(step).__name__)
    final = rels[-1] if rels else {}
    return Derivation({k: gens[k] for k in sorted(final)}, final, admitted)


# ---------------------------------------------------------------------------
# Script construction


def solve_integer_combination(rels: Sequence[dict], target: dict) -> list[int] | None:
    """Integers ``c`` with ``sum(c_i rels_i) = target``, via exact sparse elimination.

    Free unknowns are set to zero; ``None`` if inconsistent or the solution is fractional.
    """
    n = len(rels)
    eqs: dict = {k: ({}, Fraction(target.get(k, 0))) for k in target}
    for i, r in enumerate(rels):
        for k, v in r.items():
            eqs.setdefault(k, ({}, Fraction(0)))[0][i] = Fraction(v)
    pivots: dict[int, tuple[dict, Fraction]] = {}
    for k in sorted(eqs):
        row, rhs = eqs[k]
        row = {i: c for i, c in row.items() if c}
        for i in [i for i in row if i in pivots]:
            c = row.get(i, 0)
            if not c:
                continue
            prow, prhs = pivots[i]
            for j, pc in prow.items():
                v = row.get(j, 0) - c * pc
                if v:
                    row[j] = v
                else:
                    row.pop(j, None)
            rhs -= c * prhs
        if not row:
            if rhs:
                return None
            continue
        p = min(row)
        c = row[p]
        row = {j: v / c for j, v in row.items()}
        rhs /= c
        for q, (qrow, qrhs) in list(pivots.items()):
            f = qrow.get(p, 0)
            if f:
                new = dict(qrow)
                for j, v in row.items():
                    w = new.get(j, 0) - f * v
                    if w:
                        new[j] = w
                    else:
                        new.pop(j, None)
                pivots[q] = (new, qrhs - f * rhs)
        pivots[p] = (row, rhs)
    sol = [Fraction(0)] * n
    for p, (_, rhs) in pivots.items():
        sol[p] = rhs
    if any(x.denominator != 1 for x in sol):
        return None
    return [int(x) for x in sol]


class ScriptBuilder:
    """Collects steps and finishes with the combination that yields a target identity."""

    def __init__(self):
        self.steps: list = []
        self.rels: list[dict] = []

    def add(self, step) -> int:
        self.steps.append(step)
        self.rels.append(step_relation(step, self.rels))
        return len(self.steps) - 1

    def zero(self, d: DoubleExact) -> int:
        return self.add(ZeroRule(d))

    def additivity(self, d1: DoubleExact, d2: DoubleExact) -> None:
        """``[d1 + d2] = [d1] + [d2]`` via the split 3x3 diagram."""
        n = additivity_nen33(d1, d2)
        self.add(ThreeByThree(n))
        for c in n.cols:
            self.zero(c)

    def conclude(self, target: dict, name: str = "") -> ProofScript:
        coeffs = solve_integer_combination(self.rels, target)
        if coeffs is None:
            raise StepInvalid(len(self.steps), "the steps do not combine to the claimed identity")
        used = [(i, c) for i, c in enumerate(coeffs) if c]
        step = LinearCombine(tuple(i for i, _ in used), tuple(c for _, c in used))
        return ProofScript(tuple(self.steps) + (step,), name)
