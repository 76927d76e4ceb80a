from __future__ import annotations

import json

import pytest
from hypothesis import given

from conftest import triples
from diagrams import valid_diagrams
from relk import codec, serialize as ser
from relk.core_algebra import free, make_triple, RatMatrix
from relk.errors import SchemaError
from relk.nenashev import LeftRightSwap, ProofScript, SwapVanish, ThreeByThree, ZeroRule, replay
from relk.scripts import builtin_sw1_script
from relk.sequences import DirectSum, IdentityLeft, IdentityRight, LatticeInVector
from relk import lca, sequences as sq
from relk.theta import theta, theta_schematic

Z = free(1, "Z")


@given(triples(max_rank=2))
def test_triple_round_trip(t):
    assert codec.decode_triple(json.loads(codec.dumps(codec.encode_triple(t)))) == t


@given(triples(max_rank=2))
def test_schematic_and_des_round_trip(t):
    s = theta_schematic(t)
    s2 = codec.decode_schematic(json.loads(codec.dumps(codec.encode_schematic(s))))
    assert sq.compile_schematic(s2) == sq.compile_schematic(s)
    d = theta(t)
    d2 = codec.decode_des(json.loads(codec.dumps(codec.encode_des(d))))
    assert codec.des_key(d2) == codec.des_key(d)


def test_des_key_ignores_presentation():
    d = sq.double(sq.exact(LatticeInVector(Z)))
    again = sq.double(sq.exact(LatticeInVector(free(1, "Z"))))
    assert codec.des_key(d) == codec.des_key(again)
    assert codec.des_key(d) != codec.des_key(sq.double(sq.negate_inc(d.yin)))


def test_nen33_round_trip():
    n = valid_diagrams(seed=1, count=1)[0]
    doc = json.loads(ser.dumps(ser.document("nen33", **ser.encode_nen33(n))))
    assert ser.decode_nen33(doc) == n


def test_script_and_derivation_round_trip():
    X = lca.LcaObject((lca.Torus(Z), lca.Disc(Z)))
    dec = sq.exact(DirectSum((IdentityLeft(lca.LcaObject.of(lca.Torus(Z))), IdentityRight(lca.LcaObject.of(lca.Disc(Z))))))
    s = ProofScript((ZeroRule(sq.zero_des()), SwapVanish(X, True, dec),
                     ThreeByThree(valid_diagrams(seed=3, count=1)[0])), name="mixed")
    s2 = ser.decode_script(json.loads(ser.dumps(ser.encode_script(s))))
    assert s2 == s
    der = replay(s2)
    text = ser.dumps(ser.encode_derivation(der))
    assert ser.dumps(ser.encode_derivation(ser.decode_derivation(json.loads(text)))) == text


def test_sw1_script_round_trip():
    s = builtin_sw1_script(RatMatrix.of([[2]], cols=1), 1)
    s2 = ser.decode_script(json.loads(ser.dumps(ser.encode_script(s))))
    assert isinstance(s2.steps[-2], LeftRightSwap)
    assert replay(s2).identity == replay(s).identity


def test_optional_labels_and_plain_matrices():
    t = codec.decode_triple({"P": {"rank": 1}, "phi": [[2]], "Q": {"rank": 1}})
    assert t == make_triple(free(1), RatMatrix.of([[2]], cols=1), free(1))


@pytest.mark.parametrize("text", [
    "not json",
    '{"kind": "triple"}',
    '{"schema_version": 99, "kind": "triple"}',
    '{"schema_version": 1, "kind": "mystery"}',
])
def test_bad_documents(text):
    with pytest.raises(SchemaError):
        ser.parse_document(text)


@pytest.mark.parametrize("v", [
    {"P": {"rank": 1}, "Q": {"rank": 1}},
    {"P": {"rank": -1}, "phi": [], "Q": {"rank": 1}},
    {"P": {"rank": 1}, "phi": [[True]], "Q": {"rank": 1}},
    {"P": {"rank": 1}, "phi": {"rows": 1, "cols": 2, "entries": [[1]]}, "Q": {"rank": 1}},
    {"P": {"rank": 1, "order": {"kind": "weird", "k": 1}}, "phi": [[1]], "Q": {"rank": 1}},
    {"P": {"rank": 1}, "phi": [["1/0"]], "Q": {"rank": 1}},
])
def test_bad_fields(v):
    with pytest.raises(SchemaError):
        codec.decode_triple(v)


def test_unknown_step_rule():
    with pytest.raises(SchemaError):
        ser.decode_step({"rule": "Magic"})
