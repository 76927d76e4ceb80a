"""Graphviz DOT output: solid arrows are Yin, dashed arrows are Yang.

Objects sit in three columns (left, middle, right); rows run top to bottom.
"""

from __future__ import annotations

from typing import Sequence

from . import lca
from .gillet_grayson import Path
from .nenashev import Nen33
from .sequences import DoubleExact, Schematic, ShortExact

YIN = 'style=solid'
YANG = 'style=dashed'


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(f: lca.LcaMorphism) -> str:
    if not f.entries:
        return "0"
    parts = [f"[{i},{j}] {lca.render_expr(e)}" for i, j, e in lca.normalize(f).entries]
    text = "; ".join(parts)
    return text if len(text) <= 60 else text[:57] + "..."


class _Graph:
    def __init__(self, name: str):
        self.lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=plaintext];"]

    def node(self, nid: str, label: str, row: int, col: int) -> None:
        self.lines.append(f'  {nid} [label={_q(label)}, pos="{col * 3},{-row * 1.5}!"];')

    def edge(self, a: str, b: str, label: str, style: str, extra: str = "") -> None:
        attrs = [f"label={_q(label)}", style] + ([extra] if extra else [])
        self.lines.append(f"  {a} -> {b} [{', '.join(attrs)}];")

    def rank_same(self, ids: Sequence[str]) -> None:
        self.lines.append("  { rank=same; " + "; ".join(ids) + "; }")

    def text(self) -> str:
        return "\n".join(self.lines + ["}"]) + "\n"


def _row(g: _Graph, prefix: str, r: int, objs, seqs: Sequence[tuple[ShortExact, str]]) -> list[str]:
    ids = [f"{prefix}{r}_{c}" for c in range(3)]
    for c, (nid, o) in enumerate(zip(ids, objs)):
        g.node(nid, str(o), r, c)
    for se, style in seqs:
        g.edge(ids[0], ids[1], _label(se.inc), style, "arrowhead=veevee")
        g.edge(ids[1], ids[2], _label(se.sur), style, "arrowhead=normal")
    return ids


def des_dot(d: DoubleExact, name: str = "double_exact") -> str:
    g = _Graph(name)
    _row(g, "n", 0, d.objects(), [(d.yin, YIN), (d.yang, YANG)])
    return g.text()


def schematic_dot(s: Schematic, name: str = "schematic") -> str:
    """Rows above the line drawn solid (Yin), rows below dashed (Yang)."""
    g = _Graph(name)
    r = 0
    for row in s.above:
        _row(g, "a", r, row.objects(), [(row, YIN)])
        r += 1
    g.lines.append(f'  line [label="----", pos="3,{-r * 1.5}!"];')
    r += 1
    for k, row in enumerate(s.below):
        _row(g, "b", r + k, row.objects(), [(row, YANG)])
    return g.text()


def nen33_dot(n: Nen33, name: str = "nen33") -> str:
    g = _Graph(name)
    ids = [[f"x{i}_{j}" for j in range(3)] for i in range(3)]
    for i in range(3):
        for j in range(3):
            g.node(ids[i][j], str(n.obj(i, j)), i, j)
    for i, d in enumerate(n.rows):
        for se, style in ((d.yin, YIN), (d.yang, YANG)):
            g.edge(ids[i][0], ids[i][1], _label(se.inc), style)
            g.edge(ids[i][1], ids[i][2], _label(se.sur), style)
    for j, d in enumerate(n.cols):
        for se, style in ((d.yin, YIN), (d.yang, YANG)):
            g.edge(ids[0][j], ids[1][j], _label(se.inc), style)
            g.edge(ids[1][j], ids[2][j], _label(se.sur), style)
    return g.text()


def path_dot(p: Path, name: str = "path") -> str:
    """Vertices of a Gillet-Grayson path; each edge shows its dashed and solid sequence."""
    g = _Graph(name)
    vs = p.vertices()
    ids = [f"v{k}" for k in range(len(vs))]
    for k, (nid, v) in enumerate(zip(ids, vs)):
        g.node(nid, str(v), 0, k)
    for k, (edge, forward) in enumerate(p.steps):
        a, b = ids[k], ids[k + 1]
        tag = "" if forward else " (reversed)"
        for se, style in ((edge.dotted, YANG), (edge.solid, YIN)):
            g.edge(a, b, f"{se.left} >-> {se.mid} ->> {se.right}{tag}", style)
    return g.text()
