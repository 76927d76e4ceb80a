"""JSON documents for proof scripts, derivations, 3x3 diagrams and reports.

A document is an object with ``"schema_version": 1`` and a ``"kind"`` field;
the remaining fields depend on the kind.
"""

from __future__ import annotations

import json

from . import codec
from .codec import (
    SCHEMA_VERSION,
    _need,
    decode_des,
    decode_morphism,
    decode_object,
    decode_short_exact,
    encode_des,
    encode_morphism,
    encode_object,
    encode_short_exact,
)
from .errors import SchemaError
from .nenashev import (
    Derivation,
    DoubleIso,
    LeftRightSwap,
    LinearCombine,
    Nen33,
    ProofScript,
    SwapVanish,
    ThreeByThree,
    ZeroRule,
)

KINDS = (
    "triple", "triple_pair", "swan_pair", "schematic", "des", "nen33",
    "script", "derivation", "report", "boundary",
)


def document(kind: str, **fields) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown document kind {kind!r}")
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **fields}


def parse_document(text: str, kinds: tuple[str, ...] | None = None) -> dict:
    try:
        v = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not JSON: {exc}") from exc
    if _need(v, "schema_version", int) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {v['schema_version']!r}")
    kind = _need(v, "kind", str)
    if kind not in KINDS or (kinds is not None and kind not in kinds):
        want = ", ".join(kinds or KINDS)
        raise SchemaError(f"document kind {kind!r} is not one of {want}")
    return v


# ---------------------------------------------------------------------------
# 3x3 diagrams


def encode_nen33(n: Nen33) -> dict:
    return {"rows": [encode_des(d) for d in n.rows], "cols": [encode_des(d) for d in n.cols]}


def decode_nen33(v) -> Nen33:
    rows = _need(v, "rows", list)
    cols = _need(v, "cols", list)
    if len(rows) != 3 or len(cols) != 3:
        raise SchemaError("a 3x3 diagram needs exactly three rows and three columns")
    return Nen33(tuple(decode_des(d) for d in rows), tuple(decode_des(d) for d in cols))


# ---------------------------------------------------------------------------
# Steps and scripts


def encode_step(step) -> dict:
    if isinstance(step, ZeroRule):
        return {"rule": "ZeroRule", "des": encode_des(step.des)}
    if isinstance(step, ThreeByThree):
        return {"rule": "ThreeByThree", "diagram": encode_nen33(step.diagram)}
    if isinstance(step, DoubleIso):
        return {
            "rule": "DoubleIso", "d1": encode_des(step.d1), "d2": encode_des(step.d2),
            "x_left": encode_morphism(step.x_left), "x_mid": encode_morphism(step.x_mid),
            "x_right": encode_morphism(step.x_right),
        }
    if isinstance(step, LeftRightSwap):
        return {"rule": "LeftRightSwap", "object": encode_object(step.X), "phi": encode_morphism(step.phi)}
    if isinstance(step, SwapVanish):
        out = {"rule": "SwapVanish", "object": encode_object(step.X), "signed": step.signed}
        if step.decomposition is not None:
            out["decomposition"] = encode_short_exact(step.decomposition)
        return out
    if isinstance(step, LinearCombine):
        return {"rule": "LinearCombine", "refs": list(step.refs), "coeffs": list(step.coeffs)}
    raise SchemaError(f"cannot encode step {step!r}")


def _int_list(v, key) -> tuple[int, ...]:
    xs = _need(v, key, list)
    if any(not isinstance(x, int) or isinstance(x, bool) for x in xs):
        raise SchemaError(f"field {key!r} should be a list of integers")
    return tuple(xs)


def decode_step(v):
    rule = _need(v, "rule", str)
    if rule == "ZeroRule":
        return ZeroRule(decode_des(_need(v, "des")))
    if rule == "ThreeByThree":
        return ThreeByThree(decode_nen33(_need(v, "diagram")))
    if rule == "DoubleIso":
        return DoubleIso(
            decode_des(_need(v, "d1")), decode_des(_need(v, "d2")),
            decode_morphism(_need(v, "x_left")), decode_morphism(_need(v, "x_mid")),
            decode_morphism(_need(v, "x_right")),
        )
    if rule == "LeftRightSwap":
        return LeftRightSwap(decode_object(_need(v, "object")), decode_morphism(_need(v, "phi")))
    if rule == "SwapVanish":
        dec = v.get("decomposition")
        signed = v.get("signed", False)
        if not isinstance(signed, bool):
            raise SchemaError("field 'signed' should be bool")
        return SwapVanish(
            decode_object(_need(v, "object")), signed,
            decode_short_exact(dec) if dec is not None else None,
        )
    if rule == "LinearCombine":
        return LinearCombine(_int_list(v, "refs"), _int_list(v, "coeffs"))
    raise SchemaError(f"unknown rule {rule!r}")


def encode_script(s: ProofScript) -> dict:
    return document("script", name=s.name, steps=[encode_step(x) for x in s.steps])


def decode_script(v) -> ProofScript:
    name = v.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("field 'name' should be str")
    return ProofScript(tuple(decode_step(x) for x in _need(v, "steps", list)), name)


# ---------------------------------------------------------------------------
# Derivation ledgers


def encode_derivation(d: Derivation, **extra) -> dict:
    return document(
        "derivation",
        generators={k: encode_des(g) for k, g in sorted(d.generators.items())},
        identity=dict(sorted(d.identity.items())),
        admitted_rules=list(d.admitted_rules),
        **extra,
    )


def decode_derivation(v) -> Derivation:
    gens = _need(v, "generators", dict)
    ident = _need(v, "identity", dict)
    if any(not isinstance(c, int) or isinstance(c, bool) for c in ident.values()):
        raise SchemaError("identity coefficients should be integers")
    rules = v.get("admitted_rules", [])
    if not isinstance(rules, list):
        raise SchemaError("field 'admitted_rules' should be a list")
    return Derivation({k: decode_des(g) for k, g in gens.items()}, dict(ident), list(rules))


def dumps(doc: dict) -> str:
    return codec.dumps(doc)
