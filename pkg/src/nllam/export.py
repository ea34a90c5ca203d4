"""DOT rendering of proof structures and abstract proof structures."""
from __future__ import annotations

from .formula import print_formula
from .proofnet import SHAPES, ProofStructure

CONTINUATION = {"Continuation"}


def _q(s):
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g, name="net") -> str:
    """Par links are filled, tensor links open; continuation links get a double circle.
    Only hypothesis and conclusion vertices show their formula."""
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [fontname=\"Helvetica\"];"]
    if isinstance(g, ProofStructure):
        verts = sorted(g.formulas)
        label = {v: print_formula(g.formulas[v]) for v in verts}
        words = dict(zip(g.hypotheses, g.words))
        links = g.links.values()
    else:
        verts = sorted(g.vertices)
        label = {}
        for v in verts:
            f = g.h.get(v, g.c.get(v))
            if f is not None:
                label[v] = print_formula(f)
        words = g.words
        links = g.links.values()
    for v in verts:
        text = label.get(v)
        if v in words and words[v]:
            text = f"{words[v]}: {text}" if text else words[v]
        if text:
            lines.append(f"  v{_id(v)} [shape=plaintext, label={_q(text)}];")
        else:
            lines.append(f"  v{_id(v)} [shape=point];")
    for l in sorted(links, key=lambda l: l.id):
        kind, family = SHAPES[l.shape]
        shape = "doublecircle" if family in CONTINUATION else "circle"
        style = "filled" if kind == "par" else "solid"
        fill = ", fillcolor=black, fontcolor=white" if kind == "par" else ""
        lines.append(f"  l{_id(l.id)} [shape={shape}, style={style}{fill}, width=0.3, fixedsize=true, "
                     f"label={_q(l.shape)}];")
        main = l.main
        for v in l.premisses:
            arrow = "normal" if v == main else "none"
            lines.append(f"  v{_id(v)} -> l{_id(l.id)} [arrowhead={arrow}];")
        for i, v in enumerate(l.conclusions):
            arrow = "normal" if v == main else "none"
            extra = ", style=dashed" if l.shape in ("λ", "λt") and i == (0 if l.shape == "λ" else 1) else ""
            lines.append(f"  l{_id(l.id)} -> v{_id(v)} [arrowhead={arrow}{extra}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _id(x):
    return str(x) if x >= 0 else f"m{-x}"
