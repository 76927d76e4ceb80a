"""Builtin proof scripts for the relations the comparison map must respect."""

from __future__ import annotations

from dataclasses import dataclass

from . import lca, sequences as sq
from .codec import des_key
from .core_algebra import (
    BassSwanTriple,
    FreeModule,
    RatMatrix,
    SwanMorphism,
    check_swan_morphism,
    delta,
    make_triple,
    relation_b_combine,
)
from .errors import StepInvalid
from .lca import Kind, LcaMorphism, LcaObject
from .nenashev import (
    DoubleIso,
    LeftRightSwap,
    Nen33,
    ProofScript,
    ScriptBuilder,
    SwapVanish,
    ThreeByThree,
    automorphism_left,
    automorphism_right,
    onto_iso_column,
    swap_des,
    swap_split_steps,
)
from .sequences import DoubleExact, Schematic
from .theta import (
    row_coprod_shift,
    row_prod_identity,
    row_prod_shift,
    row_split_identity,
    row_twisted,
    theta,
    theta_column_atoms,
    theta_rows,
    theta_schematic,
)


def _relation(*terms: tuple[int, DoubleExact]) -> dict:
    out: dict[str, int] = {}
    for c, d in terms:
        k = des_key(d)
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Discharging columns of the form  X --(1 | sigma)--> X -> 0


def _pairs(sigma: LcaMorphism):
    """Split a signed permutation into fixed points and swapped pairs.

    Returns (fixed, pairs) where pairs holds (i, k, signed) with sigma sending
    summand k to slot i with sign +1 and summand i to slot k with the sign
    recorded by ``signed``.
    """
    nb = lca.normal_blocks(sigma)
    image = {}
    for (i, j), d in nb.items():
        m = d[0][1]
        image[j] = (i, 1 if m.is_identity() else -1)
    fixed, pairs, seen = [], [], set()
    for j in range(len(sigma.source)):
        if j in seen:
            continue
        i, s = image[j]
        if i == j:
            if s != 1:
                raise StepInvalid(-1, "column automorphism negates a summand")
            fixed.append(j)
            seen.add(j)
            continue
        back, s2 = image[i]
        if back != j:
            raise StepInvalid(-1, "column automorphism has a cycle longer than two")
        seen.update((i, j))
        # slot j receives summand i with sign s2, slot i receives j with sign s
        if s2 == 1 and s == 1:
            pairs.append((j, i, False))
        elif s2 == 1 and s == -1:
            pairs.append((j, i, True))
        elif s == 1 and s2 == -1:
            pairs.append((i, j, True))
        else:
            raise StepInvalid(-1, "column automorphism negates both summands of a swap")
    return fixed, pairs


def discharge_automorphism_column(b: ScriptBuilder, X: LcaObject, sigma: LcaMorphism) -> None:
    """Add steps proving ``[X --(1|sigma)--> X -> 0] = 0`` for a product of swaps."""
    col = automorphism_left(X, sigma)
    if lca.equal_morphisms(sigma, lca.identity(X)):
        b.zero(col)
        return
    fixed, pairs = _pairs(sigma)
    if len({s for *_, s in pairs}) > 1:
        raise StepInvalid(-1, "mixed signed and unsigned swaps in one column")
    signed = pairs[0][2]
    firsts = [p[0] for p in pairs]
    seconds = [p[1] for p in pairs]
    order = firsts + seconds + fixed
    pi = lca.permutation(X, order)
    Y = LcaObject(tuple(X[i] for i in firsts))
    F = LcaObject(tuple(X[i] for i in fixed))
    sY = swap_des(Y, signed)
    zF = automorphism_left(F, lca.identity(F))
    target = sq.direct_sum_des(sY, zF)
    b.add(DoubleIso(col, target, pi, pi, lca.identity(lca.ZERO_OBJECT)))
    if not F.is_zero:
        b.additivity(sY, zF)
        b.zero(zF)
    swap_split_steps(b, Y, signed)
    for a in Y:
        b.add(SwapVanish(LcaObject.of(a), signed))


def rewiring_nen33(old: Schematic, new: Schematic) -> tuple[Nen33, list[tuple[LcaObject, LcaMorphism]]]:
    """3x3 diagram old / new / 0 for two schematics sharing their rows.

    Yin columns are identities; Yang columns are ``I_new^-1 . I_old``.
    """
    if old.above != new.above or old.below != new.below:
        raise StepInvalid(-1, "rewiring needs identical rows")
    d_old = sq.compile_schematic(old)
    d_new = sq.compile_schematic(new)
    cols, autos = [], []
    for w_old, w_new, X in zip(
        (old.wiring.left, old.wiring.mid, old.wiring.right),
        (new.wiring.left, new.wiring.mid, new.wiring.right),
        d_old.objects(),
    ):
        sigma = lca.compose_all(lca.transpose_signed(w_new), w_old)
        cols.append(automorphism_left(X, sigma))
        autos.append((X, sigma))
    return Nen33((d_old, d_new, sq.zero_des()), tuple(cols)), autos


def add_rewiring(b: ScriptBuilder, old: Schematic, new: Schematic) -> tuple[DoubleExact, DoubleExact]:
    """Steps proving [compile(old)] = [compile(new)]; returns both compiled sequences."""
    n, autos = rewiring_nen33(old, new)
    b.add(ThreeByThree(n))
    b.zero(n.rows[2])
    for X, sigma in autos:
        discharge_automorphism_column(b, X, sigma)
    return n.rows[0], n.rows[1]


# ---------------------------------------------------------------------------
# [P, id, P] is sent to zero


def builtin_sv1_script(P: FreeModule) -> ProofScript:
    t = make_triple(P, RatMatrix.identity(P.dim), P)
    b = ScriptBuilder()
    kappa, S = add_rewiring(b, theta_schematic(t), swapped_schematic(t))
    b.zero(S)
    return b.conclude(_relation((1, kappa)), name="sv1")


def add_regroup(b: ScriptBuilder, above, below, groups) -> tuple[DoubleExact, list[DoubleExact]]:
    """Steps proving [whole] = sum of [group] for a keyed schematic split into closed groups.

    ``groups`` is a list of (above indices, below indices); each group must be
    closed under the wiring.
    """
    whole = sq.compile_schematic(sq.keyed_schematic(above, below))
    parts = [
        sq.compile_schematic(sq.keyed_schematic([above[i] for i in ga], [below[i] for i in gb]))
        for ga, gb in groups
    ]
    pis = []
    for k in range(3):
        src = sq.column_keys(above, k)
        tgt = [p for ga, _ in groups for p in sq.column_keys([above[i] for i in ga], k)]
        pis.append(sq.keyed_permutation(src, tgt))
    total = parts[0]
    for p in parts[1:]:
        total = sq.direct_sum_des(total, p)
    b.add(DoubleIso(whole, total, *pis))
    acc = parts[0]
    for p in parts[1:]:
        b.additivity(acc, p)
        acc = sq.direct_sum_des(acc, p)
    return whole, parts


# ---------------------------------------------------------------------------
# Relation A: additivity along split exact sequences of triples


@dataclass(frozen=True)
class SplitData:
    """Splittings of ``P' -> P -> P''`` and ``Q' -> Q -> Q''``.

    ``*_retraction`` is a left inverse of the inclusion, ``*_section`` a right
    inverse of the projection.
    """

    p_retraction: RatMatrix
    p_section: RatMatrix
    q_retraction: RatMatrix
    q_section: RatMatrix


def _column_map(src: BassSwanTriple, tgt: BassSwanTriple, mp: RatMatrix, mq: RatMatrix, k: int) -> LcaMorphism:
    s_atoms = [a for _, a in theta_column_atoms(src.P, src.Q)[k]]
    t_atoms = [a for _, a in theta_column_atoms(tgt.P, tgt.Q)[k]]
    roles = [r for r, _ in theta_column_atoms(src.P, src.Q)[k]]
    blocks = {}
    for i, (a, c, role) in enumerate(zip(s_atoms, t_atoms, roles)):
        if a.is_null or c.is_null:
            continue
        m = mp if role == "P" else mq
        blocks[(i, i)] = lca.Mat(a.kind, a.module, c.module, m)
    return lca.morphism(s_atoms, t_atoms, blocks)


def relation_a_nen33(a: SwanMorphism, b: SwanMorphism, split: SplitData) -> Nen33:
    if a.target != b.source:
        raise StepInvalid(0, "the two Swan morphisms are not composable")
    for name, m in (("a", a), ("b", b)):
        if not check_swan_morphism(m):
            raise StepInvalid(0, f"morphism {name} does not commute with the isomorphisms")
    t1, t, t2 = a.source, a.target, b.target
    rows = (theta(t1), theta(t), theta(t2))
    cols = []
    for k in range(3):
        inc = _column_map(t1, t, a.p, a.q, k)
        sur = _column_map(t, t2, b.p, b.q, k)
        ret = _column_map(t, t1, split.p_retraction, split.q_retraction, k)
        sec = _column_map(t2, t, split.p_section, split.q_section, k)
        objs = [r.objects()[k] for r in rows]
        cert = sq.SplitWitness(objs[0], objs[1], objs[2], inc, sur, ret, sec)
        cols.append(sq.double(sq.exact(cert)))
    return Nen33(rows, tuple(cols))


def builtin_relation_a_script(a: SwanMorphism, b: SwanMorphism, split: SplitData) -> ProofScript:
    n = relation_a_nen33(a, b, split)
    bld = ScriptBuilder()
    bld.add(ThreeByThree(n))
    for c in n.cols:
        bld.zero(c)
    r = n.rows
    return bld.conclude(_relation((1, r[0]), (-1, r[1]), (1, r[2])), name="relation-a")


# ---------------------------------------------------------------------------
# Relation B: [P, psi phi, R] = [P, phi, Q] + [Q, psi, R]

_Q_SWAP = {"Q1": "Q2", "sQ1": "sQ2", "TQ1": "TQ2", "tQ1": "tQ2"}
_Q_SWAP.update({v: k for k, v in _Q_SWAP.items()})


# Positions in the stacked schematic (first triple's rows, then the second's).
W_ROWS = ([0, 1, 2, 6, 8, 9], [0, 1, 3, 8, 7, 9])
E_ROWS = ([3, 4, 5, 7], [5, 6, 2, 4])


def relation_b_stages(t1: BassSwanTriple, t2: BassSwanTriple):
    """Keyed rows of the stacked schematic and of each stage of the chain."""
    t13 = relation_b_combine(t1, t2)
    a1, b1 = theta_rows(t1, "P", "Q1")
    a2, b2 = theta_rows(t2, "Q2", "R")
    J = (a1 + a2, b1 + b2)
    # exchange the two copies of the Q-objects on the Yang side
    Jp = (a1 + a2, [sq.rekey(r, _Q_SWAP) for r in b1 + b2])
    # rows whose Yin and Yang agree in J': Q -> (+)Q -> (+)Q etc.
    W_above = [Jp[0][i] for i in W_ROWS[0]]
    W_below = [Jp[1][i] for i in W_ROWS[1]]
    E_above = [Jp[0][i] for i in E_ROWS[0]]
    E_below = [Jp[1][i] for i in E_ROWS[1]]
    # replace Q_R by P_R through phi^-1
    tw1 = sq.rekey(row_twisted(t1, "P", "Q1"), _Q_SWAP)
    W2_above = W_above[:3] + [row_twisted(t1, "P2", "Q2")] + W_above[4:]
    W2_below = [W_below[0], W_below[1], tw1, row_twisted(t13, "P2", "R"), W_below[4], W_below[5]]
    # swap the two copies of P_R on the Yang side
    W3_below = [
        W_below[0], W_below[1],
        sq.rekey(tw1, {"vP": "vP2"}), row_twisted(t13, "P", "R"),
        W_below[4], W_below[5],
    ]
    return {
        "J": J, "J'": Jp, "W": (W_above, W_below), "E": (E_above, E_below),
        "W''": (W2_above, W2_below), "W'''": (W2_above, W3_below), "t13": t13,
    }


def builtin_relation_b_script(t1: BassSwanTriple, t2: BassSwanTriple) -> ProofScript:
    st = relation_b_stages(t1, t2)
    b = ScriptBuilder()
    k1, k2, k3 = theta(t1), theta(t2), theta(st["t13"])
    # [J] = [k1] + [k2]
    b.additivity(k1, k2)
    J = sq.keyed_schematic(*st["J"])
    Jp = sq.keyed_schematic(*st["J'"])
    add_rewiring(b, J, Jp)
    # [J'] = [W] + [E], and E has equal Yin and Yang
    above, below = st["J'"]
    _, (W, E) = add_regroup(b, above, below, [W_ROWS, E_ROWS])
    Wa = [above[i] for i in W_ROWS[0]]
    b.zero(E)
    # [W] = [W''] through phi^-1 on the copy of Q_R
    W2a, W2b = st["W''"]
    W2 = sq.compile_schematic(sq.keyed_schematic(W2a, W2b))
    xs = []
    for k in range(3):
        src = sq.column_keys(Wa, k)
        tgt = sq.column_keys(W2a, k)
        over = {}
        if k == 1:
            over["vQ2"] = lca.Mat(Kind.VECT, t1.Q, t1.P, t1.phi.inverse())
        xs.append(sq.keyed_permutation(src, [(("vQ2" if key == "vP2" else key), a) for key, a in tgt], overrides=over))
    b.add(DoubleIso(W, W2, *xs))
    # [W''] = [W''']
    add_rewiring(b, sq.keyed_schematic(W2a, W2b), sq.keyed_schematic(*st["W'''"]))
    # [W'''] = [K] + [F] with F the untwisted copy of the phi-row
    W3a, W3b = st["W'''"]
    _, (K, F) = add_regroup(b, W3a, W3b, [([0, 1, 2, 4, 5], [0, 1, 3, 4, 5]), ([3], [2])])
    b.zero(F)
    if des_key(K) != des_key(k3):
        raise StepInvalid(len(b.steps), "the final schematic is not the composite triple")
    return b.conclude(_relation((1, k1), (1, k2), (-1, k3)), name="relation-b")


# ---------------------------------------------------------------------------
# The theta image of [A^n, phi, A^n] against the automorphism phi of A_R^n


def swapped_schematic(t: BassSwanTriple) -> Schematic:
    """Rows of a triple with P = Q, the Yang wiring exchanging the P and Q roles."""
    if t.P != t.Q:
        raise StepInvalid(0, "role exchange needs P = Q")
    P = t.P
    above, _ = theta_rows(t)
    below = [
        row_coprod_shift(P, "Q"),
        row_prod_shift(P, "Q"),
        row_split_identity(P, "P"),
        row_twisted(t, "P", "P"),
        row_prod_identity(P, "P"),
    ]
    return sq.keyed_schematic(above, below)


def automorphism_representative(phi: RatMatrix, n: int) -> DoubleExact:
    """``0 -> A_R^n -> A_R^n`` with surjection phi on Yin and 1 on Yang."""
    P = delta(phi, n).P
    X = LcaObject.of(lca.Vect(P))
    return automorphism_right(X, lca.single(lca.Mat(Kind.VECT, P, P, phi)))


def builtin_sw1_script(phi: RatMatrix, n: int) -> ProofScript:
    t = delta(phi, n)
    P = t.P
    b = ScriptBuilder()
    kappa, S = add_rewiring(b, theta_schematic(t), swapped_schematic(t))
    above, _ = theta_rows(t)
    # the row P -> P_R -> T_P above is wired to the twisted row below
    below = [
        row_coprod_shift(P, "Q"), row_prod_shift(P, "Q"), row_split_identity(P, "P"),
        row_twisted(t, "P", "P"), row_prod_identity(P, "P"),
    ]
    _, (N, E) = add_regroup(b, above, below, [([1], [3]), ([0, 2, 3, 4], [0, 1, 2, 4])])
    b.zero(E)
    X = LcaObject.of(lca.Vect(P))
    f = lca.single(lca.Mat(Kind.VECT, P, P, phi))
    L = sq.double(sq.exact(sq.LatticeInVector(P)))
    cols = (
        onto_iso_column(LcaObject.of(lca.Disc(P)), lca.identity(LcaObject.of(lca.Disc(P)))),
        automorphism_left(X, f),
        onto_iso_column(LcaObject.of(lca.Torus(P)), lca.identity(LcaObject.of(lca.Torus(P)))),
    )
    n33 = Nen33((N, L, sq.zero_des()), cols)
    b.add(ThreeByThree(n33))
    for d in (L, sq.zero_des(), cols[0], cols[2]):
        b.zero(d)
    b.add(LeftRightSwap(X, f))
    R = automorphism_representative(phi, n)
    return b.conclude(_relation((1, kappa), (1, R)), name="sw1")
