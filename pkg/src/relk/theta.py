"""The ten-row schematic attached to a Bass-Swan triple."""

from __future__ import annotations

from .core_algebra import BassSwanTriple, FreeModule
from .lca import CoprodDisc, Disc, LcaObject, ProdTorus, Torus, Vect
from .sequences import (
    CoprodShift,
    DoubleExact,
    IdentityLeft,
    IdentityRight,
    KeyedRow,
    LatticeInVector,
    PhiTwisted,
    ProdShift,
    Schematic,
    compile_schematic,
    exact,
    keyed,
    keyed_schematic,
)


def _one(atom) -> LcaObject:
    return LcaObject.of(atom)


# Rows are keyed by the role a summand plays, not by its module, so that the
# wiring stays unambiguous when P and Q are the same module.


def row_split_identity(P: FreeModule, role: str) -> KeyedRow:
    """``0 -> (+)P = (+)P``."""
    a = CoprodDisc(P)
    return keyed(exact(IdentityRight(_one(a))), (), [(f"s{role}", a)], [(f"s{role}", a)])


def row_lattice(P: FreeModule, role: str) -> KeyedRow:
    """``P -> P_R -> T_P``."""
    return keyed(
        exact(LatticeInVector(P)),
        [(role, Disc(P))], [(f"v{role}", Vect(P))], [(f"t{role}", Torus(P))],
    )


def row_prod_identity(P: FreeModule, role: str) -> KeyedRow:
    """``(x)T_P = (x)T_P -> 0``."""
    a = ProdTorus(P)
    return keyed(exact(IdentityLeft(_one(a))), [(f"T{role}", a)], [(f"T{role}", a)], ())


def row_coprod_shift(P: FreeModule, role: str) -> KeyedRow:
    """``P -> (+)P -> (+)P``."""
    return keyed(
        exact(CoprodShift(P)),
        [(role, Disc(P))], [(f"s{role}", CoprodDisc(P))], [(f"s{role}", CoprodDisc(P))],
    )


def row_prod_shift(P: FreeModule, role: str) -> KeyedRow:
    """``(x)T_P -> (x)T_P -> T_P``."""
    return keyed(
        exact(ProdShift(P)),
        [(f"T{role}", ProdTorus(P))], [(f"T{role}", ProdTorus(P))], [(f"t{role}", Torus(P))],
    )


def row_twisted(t: BassSwanTriple, src_role: str, tgt_role: str) -> KeyedRow:
    """``Q -> P_R -> T_Q`` with the twisted maps; keys follow the roles of P and Q."""
    P, Q = t.P, t.Q
    return keyed(
        exact(PhiTwisted(P, t.phi, Q)),
        [(tgt_role, Disc(Q))], [(f"v{src_role}", Vect(P))], [(f"t{tgt_role}", Torus(Q))],
    )


def theta_rows(t: BassSwanTriple, p_role: str = "P", q_role: str = "Q"):
    P, Q = t.P, t.Q
    above = [
        row_split_identity(P, p_role),
        row_lattice(P, p_role),
        row_prod_identity(P, p_role),
        row_coprod_shift(Q, q_role),
        row_prod_shift(Q, q_role),
    ]
    below = [
        row_coprod_shift(P, p_role),
        row_prod_shift(P, p_role),
        row_split_identity(Q, q_role),
        row_twisted(t, p_role, q_role),
        row_prod_identity(Q, q_role),
    ]
    return above, below


def theta_schematic(t: BassSwanTriple) -> Schematic:
    above, below = theta_rows(t)
    return keyed_schematic(above, below)


def theta(t: BassSwanTriple) -> DoubleExact:
    return compile_schematic(theta_schematic(t))


def theta_column_atoms(P: FreeModule, Q: FreeModule):
    """Summands of the three objects before null atoms are dropped, tagged P or Q."""
    left = [("P", Disc(P)), ("P", ProdTorus(P)), ("Q", Disc(Q)), ("Q", ProdTorus(Q))]
    mid = [
        ("P", CoprodDisc(P)), ("P", Vect(P)), ("P", ProdTorus(P)),
        ("Q", CoprodDisc(Q)), ("Q", ProdTorus(Q)),
    ]
    right = [("P", CoprodDisc(P)), ("P", Torus(P)), ("Q", CoprodDisc(Q)), ("Q", Torus(Q))]
    return left, mid, right
