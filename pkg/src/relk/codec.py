"""JSON encoding of algebra, morphisms and sequences (schema version 1).

Every ``encode_*`` has a matching ``decode_*``; malformed input raises
:class:`SchemaError`.  Rationals are ``[numerator, denominator]`` pairs.
"""

from __future__ import annotations

import functools
import hashlib
import json
from fractions import Fraction

from . import lca, sequences as sq
from .core_algebra import BassSwanTriple, FreeModule, Order, RatMatrix, SwanMorphism, make_triple
from .errors import RelkError, SchemaError
from .lca import Atom, Kind, LcaMorphism, LcaObject

SCHEMA_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _need(d, key, typ=None):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"missing field {key!r}")
    v = d[key]
    if typ is not None and not isinstance(v, typ):
        raise SchemaError(f"field {key!r} should be {typ.__name__}")
    return v


# ---------------------------------------------------------------------------
# Algebra


def encode_rational(x: Fraction):
    return [x.numerator, x.denominator]


def decode_rational(v) -> Fraction:
    if isinstance(v, bool):
        raise SchemaError("booleans are not rationals")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational {v!r}") from exc
    if (
        isinstance(v, list) and len(v) == 2
        and all(isinstance(t, int) and not isinstance(t, bool) for t in v) and v[1] != 0
    ):
        return Fraction(v[0], v[1])
    raise SchemaError(f"bad rational {v!r}")


def encode_matrix(m: RatMatrix):
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[encode_rational(x) for x in r] for r in m.entries],
    }


def decode_matrix(v) -> RatMatrix:
    if isinstance(v, list):
        rows = [[decode_rational(x) for x in r] for r in v]
        return RatMatrix.of(rows, cols=len(rows[0]) if rows else 0)
    rows = _need(v, "entries", list)
    r, c = _need(v, "rows", int), _need(v, "cols", int)
    if len(rows) != r or any(not isinstance(row, list) or len(row) != c for row in rows):
        raise SchemaError(f"matrix entries do not match shape {r}x{c}")
    return RatMatrix(r, c, tuple(tuple(decode_rational(x) for x in row) for row in rows))


def encode_order(o: Order):
    return {"kind": o.kind, "k": o.k}


def decode_order(v) -> Order:
    if v is None:
        return Order()
    try:
        return Order(_need(v, "kind", str), _need(v, "k", int))
    except SchemaError:
        raise
    except (RelkError, ValueError) as exc:
        raise SchemaError(str(exc)) from exc


def encode_module(P: FreeModule):
    return {"rank": P.rank, "label": P.label, "order": encode_order(P.order)}


def decode_module(v) -> FreeModule:
    rank = _need(v, "rank", int)
    if rank < 0:
        raise SchemaError("negative rank")
    label = v.get("label", f"A^{rank}")
    if not isinstance(label, str):
        raise SchemaError("field 'label' should be str")
    return FreeModule(rank, label, decode_order(v.get("order")))


def encode_triple(t: BassSwanTriple):
    return {"P": encode_module(t.P), "phi": encode_matrix(t.phi), "Q": encode_module(t.Q)}


def decode_triple(v) -> BassSwanTriple:
    return make_triple(decode_module(_need(v, "P")), decode_matrix(_need(v, "phi")), decode_module(_need(v, "Q")))


def encode_swan_morphism(m: SwanMorphism):
    return {
        "source": encode_triple(m.source),
        "target": encode_triple(m.target),
        "p": encode_matrix(m.p),
        "q": encode_matrix(m.q),
    }


def decode_swan_morphism(v) -> SwanMorphism:
    return SwanMorphism(
        decode_triple(_need(v, "source")), decode_triple(_need(v, "target")),
        decode_matrix(_need(v, "p")), decode_matrix(_need(v, "q")),
    )


# ---------------------------------------------------------------------------
# Objects and morphisms


def encode_atom(a: Atom):
    if a.kind is Kind.ZERO:
        return {"kind": "Zero"}
    return {"kind": a.kind.value, "module": encode_module(a.module)}


def decode_atom(v) -> Atom:
    kind = _need(v, "kind", str)
    try:
        k = Kind(kind)
    except ValueError as exc:
        raise SchemaError(f"unknown atom kind {kind!r}") from exc
    if k is Kind.ZERO:
        return lca.ZERO_ATOM
    return Atom(k, decode_module(_need(v, "module")))


def encode_object(x: LcaObject):
    return [encode_atom(a) for a in x]


def decode_object(v) -> LcaObject:
    if not isinstance(v, list):
        raise SchemaError("an object is a list of atoms")
    return LcaObject(tuple(decode_atom(a) for a in v))


_MODULE_NODES = {
    "Iota": lca.Iota, "QuotT": lca.QuotT, "ShiftCoprod": lca.ShiftCoprod,
    "InclCoprod0": lca.InclCoprod0, "ShiftProd": lca.ShiftProd, "ProjProd0": lca.ProjProd0,
}


@functools.lru_cache(maxsize=None)
def _encode_expr_cached(e: lca.PrimExpr) -> str:
    return canonical_json(_encode_expr(e))


def _encode_expr(e):
    if isinstance(e, lca.ZeroMap):
        return {"op": "Zero", "src": encode_atom(e.src), "tgt": encode_atom(e.tgt)}
    if isinstance(e, lca.Id):
        return {"op": "Id", "atom": encode_atom(e.atom)}
    for name, cls in _MODULE_NODES.items():
        if type(e) is cls:
            return {"op": name, "P": encode_module(e.P)}
    if isinstance(e, lca.Mat):
        return {
            "op": "Mat", "kind": e.kind.value, "P": encode_module(e.P),
            "Q": encode_module(e.Q), "matrix": encode_matrix(e.matrix),
        }
    if isinstance(e, lca.Neg):
        return {"op": "Neg", "arg": encode_expr(e.arg)}
    if isinstance(e, lca.Comp):
        return {"op": "Comp", "outer": encode_expr(e.outer), "inner": encode_expr(e.inner)}
    if isinstance(e, lca.Sum):
        return {"op": "Sum", "left": encode_expr(e.left), "right": encode_expr(e.right)}
    raise SchemaError(f"cannot encode {e!r}")


def encode_expr(e: lca.PrimExpr):
    return json.loads(_encode_expr_cached(e))


def decode_expr(v) -> lca.PrimExpr:
    op = _need(v, "op", str)
    try:
        if op == "Zero":
            return lca.ZeroMap(decode_atom(_need(v, "src")), decode_atom(_need(v, "tgt")))
        if op == "Id":
            return lca.Id(decode_atom(_need(v, "atom")))
        if op in _MODULE_NODES:
            return _MODULE_NODES[op](decode_module(_need(v, "P")))
        if op == "Mat":
            return lca.Mat(
                Kind(_need(v, "kind", str)), decode_module(_need(v, "P")),
                decode_module(_need(v, "Q")), decode_matrix(_need(v, "matrix")),
            )
        if op == "Neg":
            return lca.Neg(decode_expr(_need(v, "arg")))
        if op == "Comp":
            return lca.Comp(decode_expr(_need(v, "outer")), decode_expr(_need(v, "inner")))
        if op == "Sum":
            return lca.Sum(decode_expr(_need(v, "left")), decode_expr(_need(v, "right")))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unknown expression op {op!r}")


def encode_morphism(f: LcaMorphism):
    return {
        "source": encode_object(f.source),
        "target": encode_object(f.target),
        "blocks": [[i, j, encode_expr(e)] for i, j, e in f.entries],
    }


def decode_morphism(v) -> LcaMorphism:
    blocks = _need(v, "blocks", list)
    ents = []
    for b in blocks:
        if not (isinstance(b, list) and len(b) == 3 and isinstance(b[0], int) and isinstance(b[1], int)):
            raise SchemaError("a block is [target_index, source_index, expression]")
        ents.append((b[0], b[1], decode_expr(b[2])))
    return LcaMorphism(decode_object(_need(v, "source")), decode_object(_need(v, "target")), tuple(ents))


# ---------------------------------------------------------------------------
# Certificates and sequences


def encode_cert(c):
    if isinstance(c, (sq.LatticeInVector, sq.CoprodShift, sq.ProdShift)):
        return {"tag": sq.cert_name(c), "P": encode_module(c.P)}
    if isinstance(c, sq.PhiTwisted):
        return {"tag": "PhiTwisted", "P": encode_module(c.P), "phi": encode_matrix(c.phi), "Q": encode_module(c.Q)}
    if isinstance(c, (sq.IdentityLeft, sq.IdentityRight)):
        return {"tag": sq.cert_name(c), "X": encode_object(c.X)}
    if isinstance(c, sq.ZeroSeq):
        return {"tag": "ZeroSeq"}
    if isinstance(c, sq.DirectSum):
        return {"tag": "DirectSum", "parts": [encode_cert(p) for p in c.parts]}
    if isinstance(c, sq.RewiredByIso):
        return {
            "tag": "RewiredByIso", "inner": encode_cert(c.inner),
            "isos": [encode_morphism(m) for m in (c.left_iso, c.mid_iso, c.right_iso)],
        }
    if isinstance(c, sq.SplitWitness):
        return {
            "tag": "SplitWitness",
            "left": encode_object(c.left), "mid": encode_object(c.mid), "right": encode_object(c.right),
            "inc": encode_morphism(c.inc), "sur": encode_morphism(c.sur),
            "retraction": encode_morphism(c.retraction), "section": encode_morphism(c.section),
        }
    if isinstance(c, sq.QuotientCg):
        return {"tag": "QuotientCg", "inner": encode_cert(c.inner)}
    raise SchemaError(f"cannot encode certificate {c!r}")


def decode_cert(v):
    tag = _need(v, "tag", str)
    if tag in ("LatticeInVector", "CoprodShift", "ProdShift"):
        return getattr(sq, tag)(decode_module(_need(v, "P")))
    if tag == "PhiTwisted":
        return sq.PhiTwisted(decode_module(_need(v, "P")), decode_matrix(_need(v, "phi")), decode_module(_need(v, "Q")))
    if tag in ("IdentityLeft", "IdentityRight"):
        return getattr(sq, tag)(decode_object(_need(v, "X")))
    if tag == "ZeroSeq":
        return sq.ZeroSeq()
    if tag == "DirectSum":
        return sq.DirectSum(tuple(decode_cert(p) for p in _need(v, "parts", list)))
    if tag == "RewiredByIso":
        isos = _need(v, "isos", list)
        if len(isos) != 3:
            raise SchemaError("RewiredByIso needs three isomorphisms")
        return sq.RewiredByIso(decode_cert(_need(v, "inner")), *(decode_morphism(m) for m in isos))
    if tag == "SplitWitness":
        return sq.SplitWitness(
            decode_object(_need(v, "left")), decode_object(_need(v, "mid")), decode_object(_need(v, "right")),
            decode_morphism(_need(v, "inc")), decode_morphism(_need(v, "sur")),
            decode_morphism(_need(v, "retraction")), decode_morphism(_need(v, "section")),
        )
    if tag == "QuotientCg":
        return sq.QuotientCg(decode_cert(_need(v, "inner")))
    raise SchemaError(f"unknown certificate tag {tag!r}")


def encode_short_exact(s: sq.ShortExact):
    return {
        "left": encode_object(s.left), "mid": encode_object(s.mid), "right": encode_object(s.right),
        "inc": encode_morphism(s.inc), "sur": encode_morphism(s.sur), "cert": encode_cert(s.cert),
    }


def decode_short_exact(v) -> sq.ShortExact:
    """Decoded sequences are not validated here; consumers validate on use."""
    return sq.ShortExact(
        decode_object(_need(v, "left")), decode_object(_need(v, "mid")), decode_object(_need(v, "right")),
        decode_morphism(_need(v, "inc")), decode_morphism(_need(v, "sur")), decode_cert(_need(v, "cert")),
    )


def encode_des(d: sq.DoubleExact):
    return {"yin": encode_short_exact(d.yin), "yang": encode_short_exact(d.yang)}


def decode_des(v) -> sq.DoubleExact:
    try:
        return sq.DoubleExact(decode_short_exact(_need(v, "yin")), decode_short_exact(_need(v, "yang")))
    except RelkError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc)) from exc


def encode_schematic(s: sq.Schematic):
    return {
        "above": [encode_short_exact(r) for r in s.above],
        "below": [encode_short_exact(r) for r in s.below],
        "wiring": {
            "I'": encode_morphism(s.wiring.left),
            "I": encode_morphism(s.wiring.mid),
            "I''": encode_morphism(s.wiring.right),
        },
    }


def decode_schematic(v) -> sq.Schematic:
    w = _need(v, "wiring", dict)
    return sq.Schematic(
        tuple(decode_short_exact(r) for r in _need(v, "above", list)),
        tuple(decode_short_exact(r) for r in _need(v, "below", list)),
        sq.Wiring(decode_morphism(_need(w, "I'")), decode_morphism(_need(w, "I")), decode_morphism(_need(w, "I''"))),
    )


# ---------------------------------------------------------------------------
# Generator identity


@functools.lru_cache(maxsize=4096)
def des_key(d: sq.DoubleExact) -> str:
    """Digest of the objects and normalized maps; certificates are ignored."""
    payload = {
        "objects": [encode_object(x) for x in d.objects()],
        "maps": [
            encode_morphism(lca.normalize(f))
            for f in (d.yin.inc, d.yang.inc, d.yin.sur, d.yang.sur)
        ],
    }
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()[:16]
