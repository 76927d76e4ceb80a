"""Exception hierarchy shared by all relk modules."""

from __future__ import annotations


class RelkError(Exception):
    """Base class; ``kind`` names the module-level error for reports."""

    kind = "RelkError"

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.kind}: {msg}" if msg else self.kind


def _make(name: str, base: type = RelkError) -> type:
    return type(name, (base,), {"kind": name})


# core_algebra
DimensionMismatch = _make("DimensionMismatch")
SingularMatrix = _make("SingularMatrix")
MiddleMismatch = _make("MiddleMismatch")
UnsupportedOrder = _make("UnsupportedOrder")

# lca_category
EndpointMismatch = _make("EndpointMismatch")
ElementShapeMismatch = _make("ElementShapeMismatch")
NormalFormVsEvalDisagreement = _make("NormalFormVsEvalDisagreement")
NotIso = _make("NotIso")

# sequences
CompositeNotZero = _make("CompositeNotZero")
TagMismatch = _make("TagMismatch")
WiringNotIso = _make("WiringNotIso")
ColumnMismatch = _make("ColumnMismatch")

# nenashev
YinYangDiffer = _make("YinYangDiffer")
RowNotExact = _make("RowNotExact")
ColNotExact = _make("ColNotExact")
YinDiagramNotCommuting = _make("YinDiagramNotCommuting")
YangDiagramNotCommuting = _make("YangDiagramNotCommuting")
NotAutomorphism = _make("NotAutomorphism")
MissingDecomposition = _make("MissingDecomposition")
DecompositionInvalid = _make("DecompositionInvalid")

# gillet_grayson
LiftProjectionMismatch = _make("LiftProjectionMismatch")

# serialization / cli
SchemaError = _make("SchemaError")


class StepInvalid(RelkError):
    kind = "StepInvalid"

    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason
