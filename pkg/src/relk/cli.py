"""Command-line front end.

Exit status: 0 on success, 1 when a check fails, 2 when the input cannot be parsed.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from fractions import Fraction

from . import codec, dot, gillet_grayson as gg, nenashev, scripts, serialize as ser
from .codec import _need, decode_matrix, decode_swan_morphism, decode_triple, des_key
from .core_algebra import RatMatrix, delta, det_invariant, free, make_triple, relation_b_combine
from .errors import RelkError, SchemaError, StepInvalid
from .instances import composable_pair, invertible, split_instance
from .theta import theta, theta_schematic

BUILTINS = ("sv1", "relation-a", "relation-b", "sw1")


class Failure(Exception):
    """A check failed; the message names the wrapped error."""


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load(args, kinds: tuple[str, ...]) -> dict:
    return ser.parse_document(_read(args.input), kinds)


def _fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_theta(args) -> int:
    t = decode_triple(_load(args, ("triple",)))
    s = theta_schematic(t)
    d = theta(t)
    doc = ser.document(
        "schematic", triple=codec.encode_triple(t), schematic=codec.encode_schematic(s),
        des=codec.encode_des(d), des_key=des_key(d),
    )
    _write(args.out, ser.dumps(doc))
    if args.dot:
        _write(args.dot, dot.schematic_dot(s, "theta"))
    return 0


def cmd_check33(args) -> int:
    n = ser.decode_nen33(_load(args, ("nen33",)))
    try:
        der = nenashev.check_33(n)
    except RelkError as exc:
        report = ser.document("report", check="check-33", ok=False, error=exc.kind, message=str(exc))
        _write(args.out, ser.dumps(report))
        raise Failure(f"check-33 failed: {exc}") from exc
    report = ser.document("report", check="check-33", ok=True, relation=dict(sorted(der.identity.items())))
    _write(args.out, ser.dumps(report))
    if args.dot:
        _write(args.dot, dot.nen33_dot(n))
    return 0


def _builtin(args):
    """The script and a description of its claimed terms."""
    rng = random.Random(args.seed)
    doc = ser.parse_document(_read(args.input)) if args.input else None
    name = args.builtin
    if name == "sv1":
        P = decode_triple(doc).P if doc else free(rng.randint(0, args.max_rank), "P")
        t = make_triple(P, RatMatrix.identity(P.dim), P)
        return scripts.builtin_sv1_script(P), [(1, theta(t), "theta(P, 1, P)")]
    if name == "relation-a":
        if doc:
            if doc["kind"] != "swan_pair":
                raise SchemaError("relation-a expects a swan_pair document")
            a, b = decode_swan_morphism(_need(doc, "a")), decode_swan_morphism(_need(doc, "b"))
            sp = _need(doc, "split", dict)
            split = scripts.SplitData(*(decode_matrix(_need(sp, k)) for k in
                                        ("p_retraction", "p_section", "q_retraction", "q_section")))
        else:
            a, b, split = split_instance(rng, min(args.max_rank, 2))
        terms = [(1, theta(a.source), "theta(t')"), (-1, theta(a.target), "theta(t)"),
                 (1, theta(b.target), "theta(t'')")]
        return scripts.builtin_relation_a_script(a, b, split), terms
    if name == "relation-b":
        if doc:
            if doc["kind"] != "triple_pair":
                raise SchemaError("relation-b expects a triple_pair document")
            t1, t2 = decode_triple(_need(doc, "first")), decode_triple(_need(doc, "second"))
        else:
            t1, t2 = composable_pair(rng, max(args.max_rank, 1))
        t3 = relation_b_combine(t1, t2)
        terms = [(1, theta(t1), "theta(P, phi, Q)"), (1, theta(t2), "theta(Q, psi, R)"),
                 (-1, theta(t3), "theta(P, psi phi, R)")]
        return scripts.builtin_relation_b_script(t1, t2), terms
    if name == "sw1":
        if doc:
            phi = decode_triple(doc).phi
        else:
            phi = invertible(rng, rng.randint(1, max(args.max_rank, 1)))
        n = phi.rows
        terms = [(1, theta(delta(phi, n)), "theta(delta(phi))"),
                 (1, scripts.automorphism_representative(phi, n), "0 >-> V ->>(phi, 1) V")]
        return scripts.builtin_sw1_script(phi, n), terms
    raise SchemaError(f"unknown builtin {name!r}")


def cmd_replay(args) -> int:
    terms = None
    if args.builtin:
        script, terms = _builtin(args)
    else:
        script = ser.decode_script(_load(args, ("script",)))
    try:
        der = nenashev.replay(script)
    except StepInvalid as exc:
        raise Failure(f"replay failed: StepInvalid at step {exc.index}: {exc.reason}") from exc
    extra = {"script": script.name, "steps": len(script.steps)}
    if terms is not None:
        extra["claimed"] = [[c, des_key(d), label] for c, d, label in terms]
        extra["matches_claim"] = der.matches([(c, d) for c, d, _ in terms])
    _write(args.out, ser.dumps(ser.encode_derivation(der, **extra)))
    if terms is not None and not extra["matches_claim"]:
        raise Failure("replay failed: the derived identity differs from the claimed one")
    return 0


def _module_label(obj) -> str:
    return " + ".join(a.module.label for a in obj) or "0"


def cmd_boundary(args) -> int:
    t = decode_triple(_load(args, ("triple",)))
    r = gg.boundary(t)
    doc = ser.document(
        "boundary",
        **{"class": list(r.k0)},
        endpoint=[_module_label(r.endpoint.first), _module_label(r.endpoint.second)],
        path=list(gg.path_edges(r.path)),
    )
    _write(args.out, ser.dumps(doc))
    if args.dot:
        _write(args.dot, dot.path_dot(r.path, "boundary"))
    return 0


def cmd_invariant(args) -> int:
    t = decode_triple(_load(args, ("triple",)))
    _write(args.out, _fmt_rational(det_invariant(t)) + "\n")
    return 0


def cmd_render(args) -> int:
    doc = _load(args, ("triple", "schematic", "des", "nen33"))
    kind = doc["kind"]
    if kind == "triple":
        text = dot.schematic_dot(theta_schematic(decode_triple(doc)), "theta")
    elif kind == "schematic":
        text = dot.schematic_dot(codec.decode_schematic(_need(doc, "schematic")))
    elif kind == "des":
        text = dot.des_dot(codec.decode_des(_need(doc, "des")))
    else:
        text = dot.nen33_dot(ser.decode_nen33(doc))
    _write(args.dot or args.out, text)
    return 0


COMMANDS = {
    "theta": cmd_theta,
    "check-33": cmd_check33,
    "replay": cmd_replay,
    "boundary": cmd_boundary,
    "invariant": cmd_invariant,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relk", description="Relative K-theory diagram checker.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--in", dest="input", help="input JSON document (default: stdin)")
        s.add_argument("--out", help="output path (default: stdout)")
        s.add_argument("--dot", help="also write a DOT figure here")
        s.add_argument("--seed", type=int, default=0, help="seed for generated builtin instances")
        s.add_argument("--max-rank", type=int, default=3, help="largest rank of generated instances")
        if name == "replay":
            s.add_argument("--builtin", choices=BUILTINS, help="replay a builtin derivation")
    return p


def _configure_logging() -> None:
    level = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("RELK_LOG", "quiet").lower(), logging.ERROR
    )
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SchemaError as exc:
        print(f"relk {args.command}: {exc}", file=sys.stderr)
        return 2
    except Failure as exc:
        print(f"relk {args.command}: {exc}", file=sys.stderr)
        return 1
    except StepInvalid as exc:
        print(f"relk {args.command}: StepInvalid at step {exc.index}: {exc.reason}", file=sys.stderr)
        return 1
    except RelkError as exc:
        print(f"relk {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
