"""Exact verification of relative K-theory relations between locally compact modules.

Bass-Swan triples are mapped to double exact sequences of formal locally
compact modules; relations between them are certified by replayable proof
scripts built from Nenashev's 3x3 rule.
"""

from .core_algebra import (
    BassSwanTriple,
    FreeModule,
    Order,
    RatMatrix,
    SwanMorphism,
    check_swan_morphism,
    delta,
    det_invariant,
    free,
    k0_class,
    make_triple,
    relation_b_combine,
)
from .errors import RelkError, StepInvalid
from .gillet_grayson import boundary, e_of_object, lift_edge, loop_e, quotient_cg
from .lca import LcaMorphism, LcaObject, equal_morphisms, normalize
from .nenashev import Derivation, Nen33, ProofScript, check_33, check_zero_rule, replay
from .scripts import (
    builtin_relation_a_script,
    builtin_relation_b_script,
    builtin_sv1_script,
    builtin_sw1_script,
)
from .sequences import DoubleExact, Schematic, ShortExact, compile_schematic
from .theta import theta, theta_schematic

__version__ = "0.1.0"

__all__ = [
    "BassSwanTriple", "FreeModule", "Order", "RatMatrix", "SwanMorphism",
    "check_swan_morphism", "delta", "det_invariant", "free", "k0_class", "make_triple",
    "relation_b_combine", "RelkError", "StepInvalid", "boundary", "e_of_object", "lift_edge",
    "loop_e", "quotient_cg", "LcaMorphism", "LcaObject", "equal_morphisms", "normalize",
    "Derivation", "Nen33", "ProofScript", "check_33", "check_zero_rule", "replay",
    "builtin_relation_a_script", "builtin_relation_b_script", "builtin_sv1_script",
    "builtin_sw1_script", "DoubleExact", "Schematic", "ShortExact", "compile_schematic",
    "theta", "theta_schematic",
]
