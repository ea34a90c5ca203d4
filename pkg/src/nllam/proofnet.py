"""Links, formula unfolding, proof structures and extended axiom linkings."""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace as dc_replace
from typing import Optional

from .formula import (Atom, CLDiv, CProd, CRDiv, Formula, LDiv, Polarity, Prod, RDiv, Unit, parse_formula,
                      print_formula)

TENSOR, PAR = "tensor", "par"

# shape -> (kind, family)
SHAPES = {
    "/L": (TENSOR, "Lambek"), "\\L": (TENSOR, "Lambek"), "•R": (TENSOR, "Lambek"),
    "/R": (PAR, "Lambek"), "\\R": (PAR, "Lambek"), "•L": (PAR, "Lambek"),
    "⤉L": (TENSOR, "Continuation"), "⤈L": (TENSOR, "Continuation"), "⊙R": (TENSOR, "Continuation"),
    "⤉R": (PAR, "Continuation"), "⤈R": (PAR, "Continuation"), "⊙L": (PAR, "Continuation"),
    "tR": (TENSOR, "UnitRight"), "tL": (PAR, "UnitLeft"),
    "∘": (TENSOR, "Lambek"), "⊚": (TENSOR, "Continuation"), "1": (TENSOR, "UnitRight"),
    "λ": (TENSOR, "Lambda"),
    # hybrid type-logical grammar alphabet
    "+": (TENSOR, "Lambek"), "@": (TENSOR, "Lambda"), "λt": (TENSOR, "Lambda"),
    "λpar": (PAR, "Lambda"), "ε": (TENSOR, "UnitRight"),
}

PAR_SHAPES = frozenset(k for k, v in SHAPES.items() if v[0] == PAR)

# par shape -> which tentacle is the main formula
MAIN_SLOT = {"/R": ("c", 0), "⤉R": ("c", 0), "\\R": ("c", 1), "⤈R": ("c", 1),
             "•L": ("p", 0), "⊙L": ("p", 0), "tL": ("p", 0), "λpar": ("c", 0)}

# proof-structure tensor shape -> abstract structural shape
STRUCTURAL = {"/L": "∘", "\\L": "∘", "•R": "∘", "⤉L": "⊚", "⤈L": "⊚", "⊙R": "⊚", "tR": "1"}


@dataclass(frozen=True)
class Link:
    id: int
    shape: str
    premisses: tuple
    conclusions: tuple
    origin: Optional[str] = None
    formulas: tuple = ()  # formula per tentacle, premisses first, when known

    @property
    def kind(self):
        return SHAPES[self.shape][0]

    @property
    def family(self):
        return SHAPES[self.shape][1]

    @property
    def is_par(self):
        return self.shape in PAR_SHAPES

    @property
    def main(self):
        slot = MAIN_SLOT.get(self.shape)
        if slot is None:
            return None
        side, i = slot
        return self.premisses[i] if side == "p" else self.conclusions[i]

    def tentacles(self):
        return self.premisses + self.conclusions

    def formula_of(self, side, i):
        if not self.formulas:
            return None
        return self.formulas[i if side == "p" else len(self.premisses) + i]

    def rename(self, old, new):
        if old not in self.premisses and old not in self.conclusions:
            return self
        return Link(self.id, self.shape,
                    tuple(new if v == old else v for v in self.premisses),
                    tuple(new if v == old else v for v in self.conclusions),
                    self.origin, self.formulas)


class MalformedStructure(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


@dataclass
class ProofStructure:
    """Formula occurrences (vertices) and links between them."""
    formulas: dict                     # vertex -> Formula
    links: dict                        # link id -> Link
    hypotheses: list                   # designated hypothesis roots, in word order
    words: list                        # word per designated hypothesis (or None)
    goal: Optional[int] = None         # designated conclusion
    unit_pairs: dict = field(default_factory=dict)  # tL link id -> tR link id
    linked: bool = False

    def above(self):
        out = {}
        for l in self.links.values():
            for v in l.conclusions:
                if v in out:
                    raise MalformedStructure(f"vertex {v} is twice a conclusion")
                out[v] = l.id
        return out

    def below(self):
        out = {}
        for l in self.links.values():
            for v in l.premisses:
                if v in out:
                    raise MalformedStructure(f"vertex {v} is twice a premiss")
                out[v] = l.id
        return out

    def hypothesis_vertices(self):
        """Vertices which are no link's conclusion, the goal excluded."""
        ab = self.above()
        return [v for v in sorted(self.formulas) if v not in ab and v != self.goal]

    def conclusion_vertices(self):
        be = self.below()
        return [v for v in sorted(self.formulas) if v not in be]

    def open_ends(self):
        """(hypothesis ends, conclusion ends): atomic vertices awaiting an axiom link.

        A hypothesis end lacks a link above it, a conclusion end lacks one below;
        designated lexical roots and the goal are never ends of their own kind.
        """
        ab, be = self.above(), self.below()
        lexical = set(self.hypotheses)
        hyp_ends = [v for v in sorted(self.formulas)
                    if isinstance(self.formulas[v], Atom) and v not in ab and v not in lexical]
        con_ends = [v for v in sorted(self.formulas)
                    if isinstance(self.formulas[v], Atom) and v not in be and v != self.goal]
        return hyp_ends, con_ends

    def unit_links(self):
        tl = sorted(l.id for l in self.links.values() if l.shape == "tL")
        tr = sorted(l.id for l in self.links.values() if l.shape == "tR")
        return tl, tr

    def to_json(self):
        ab, be = self.above(), self.below()
        verts = []
        for v in sorted(self.formulas):
            role = "internal"
            if v not in ab and v not in be:
                role = "axiom"
            elif v not in ab:
                role = "hypothesis"
            elif v not in be:
                role = "conclusion"
            verts.append({"id": v, "formula": print_formula(self.formulas[v]), "role": role})
        links = []
        for l in sorted(self.links.values(), key=lambda l: l.id):
            d = {"id": l.id, "shape": l.shape, "premisses": list(l.premisses), "conclusions": list(l.conclusions)}
            if l.main is not None:
                d["main"] = l.main
            links.append(d)
        return {"alphabet": "nllam", "kind": "proof_structure", "vertices": verts, "links": links,
                "hypotheses": list(self.hypotheses), "words": list(self.words), "goal": self.goal,
                "unit_pairs": [[a, b] for a, b in sorted(self.unit_pairs.items())], "linked": self.linked}

    @classmethod
    def from_json(cls, d):
        formulas = {v["id"]: parse_formula(v["formula"]) for v in d["vertices"]}
        links = {}
        for l in d["links"]:
            tent = tuple(l["premisses"]) + tuple(l["conclusions"])
            links[l["id"]] = Link(l["id"], l["shape"], tuple(l["premisses"]), tuple(l["conclusions"]),
                                  None, tuple(formulas[v] for v in tent))
        return cls(formulas, links, list(d["hypotheses"]), list(d["words"]), d["goal"],
                   {a: b for a, b in d.get("unit_pairs", [])}, d.get("linked", False))


class _Builder:
    def __init__(self, start_vertex=0, start_link=0):
        self.formulas = {}
        self.links = {}
        self.nv = start_vertex
        self.nl = start_link

    def vertex(self, f):
        v = self.nv
        self.nv += 1
        self.formulas[v] = f
        return v

    def link(self, shape, prem, concl):
        lid = self.nl
        self.nl += 1
        fs = tuple(self.formulas[v] for v in prem + concl)
        self.links[lid] = Link(lid, shape, tuple(prem), tuple(concl), None, fs)
        return lid

    def unfold(self, f, pol, root, opaque=frozenset()):
        if isinstance(f, Atom) or f in opaque:
            return
        hyp = pol is Polarity.HYPOTHESIS
        if isinstance(f, Unit):
            if hyp:
                self.link("tL", (root,), ())
            else:
                self.link("tR", (), (root,))
            return
        H, C = Polarity.HYPOTHESIS, Polarity.CONCLUSION
        if isinstance(f, (RDiv, CRDiv)):
            res, arg = f.left, f.right
            cont = isinstance(f, CRDiv)
            vr = self.vertex(res)
            va = self.vertex(arg)
            if hyp:
                self.link("⤉L" if cont else "/L", (root, va), (vr,))
                self.unfold(arg, C, va, opaque)
                self.unfold(res, H, vr, opaque)
            else:
                self.link("⤉R" if cont else "/R", (vr,), (root, va))
                self.unfold(res, C, vr, opaque)
                self.unfold(arg, H, va, opaque)
        elif isinstance(f, (LDiv, CLDiv)):
            arg, res = f.left, f.right
            cont = isinstance(f, CLDiv)
            va = self.vertex(arg)
            vr = self.vertex(res)
            if hyp:
                self.link("⤈L" if cont else "\\L", (va, root), (vr,))
                self.unfold(arg, C, va, opaque)
                self.unfold(res, H, vr, opaque)
            else:
                self.link("⤈R" if cont else "\\R", (vr,), (va, root))
                self.unfold(arg, H, va, opaque)
                self.unfold(res, C, vr, opaque)
        elif isinstance(f, (Prod, CProd)):
            cont = isinstance(f, CProd)
            va = self.vertex(f.left)
            vb = self.vertex(f.right)
            if hyp:
                self.link("⊙L" if cont else "•L", (root,), (va, vb))
                self.unfold(f.left, H, va, opaque)
                self.unfold(f.right, H, vb, opaque)
            else:
                self.link("⊙R" if cont else "•R", (va, vb), (root,))
                self.unfold(f.left, C, va, opaque)
                self.unfold(f.right, C, vb, opaque)
        else:
            raise TypeError(f)


def unfold(f: Formula, polarity: Polarity, opaque=frozenset()) -> ProofStructure:
    """Unfold one formula occurrence; subformulas in opaque stay unanalysed."""
    b = _Builder()
    root = b.vertex(f)
    b.unfold(f, polarity, root, frozenset(opaque))
    if polarity is Polarity.HYPOTHESIS:
        return ProofStructure(b.formulas, b.links, [root], [None], None)
    return ProofStructure(b.formulas, b.links, [], [], root)


def unfold_sequent(hypotheses, goal: Formula, opaque=frozenset()) -> ProofStructure:
    """hypotheses: list of (word, Formula); vertex ids follow word order, goal last."""
    if not hypotheses:
        raise ValueError("need at least one hypothesis")
    b = _Builder()
    roots, words = [], []
    for word, f in hypotheses:
        r = b.vertex(f)
        b.unfold(f, Polarity.HYPOTHESIS, r, frozenset(opaque))
        roots.append(r)
        words.append(word)
    g = b.vertex(goal)
    b.unfold(goal, Polarity.CONCLUSION, g, frozenset(opaque))
    return ProofStructure(b.formulas, b.links, roots, words, g)


@dataclass(frozen=True)
class ExtendedLinking:
    atom_pairs: tuple   # (hypothesis end, conclusion end) pairs, sorted by hypothesis end
    unit_pairs: tuple = ()  # (tL link id, tR link id) pairs

    def to_json(self):
        return {"atom_pairs": [list(p) for p in self.atom_pairs], "unit_pairs": [list(p) for p in self.unit_pairs]}


def _grouped_ends(ps, unit_insertion=False):
    hyp_ends, con_ends = ps.open_ends()
    hg, cg = defaultdict(list), defaultdict(list)
    for v in hyp_ends:
        hg[ps.formulas[v].name].append(v)
    for v in con_ends:
        cg[ps.formulas[v].name].append(v)
    for name in set(hg) | set(cg):
        if len(hg[name]) != len(cg[name]):
            raise ArityMismatch(f"atom {name}: {len(cg[name])} to link from above, {len(hg[name])} below")
    tl, tr = ps.unit_links()
    if unit_insertion:
        return hg, cg, [], tr
    if len(tl) > len(tr):
        raise ArityMismatch(f"{len(tl)} tL links but only {len(tr)} tR links")
    return hg, cg, tl, tr


def count_linkings(ps, unit_insertion=False) -> int:
    hg, cg, tl, tr = _grouped_ends(ps, unit_insertion)
    n = 1
    for name in hg:
        n *= math.factorial(len(hg[name]))
    return n * math.perm(len(tr), len(tl))


def enumerate_linkings(ps: ProofStructure, unit_insertion=False):
    """All extended axiom linkings, in lexicographic order of
    (atom name, hypothesis end, conclusion end).

    Each tL link is matched with a distinct tR link. Surplus tR links are
    allowed: their 1 can still disappear through a 1∘ or ∘1 step. With
    unit_insertion a tL may meet any 1 later, so no unit pairs are fixed.
    """
    hg, cg, tl, tr = _grouped_ends(ps, unit_insertion)
    names = sorted(hg)
    per_atom = [[tuple(zip(hg[n], perm)) for perm in itertools.permutations(cg[n])] for n in names]
    unit_choices = [tuple(zip(tl, perm)) for perm in itertools.permutations(tr, len(tl))]
    for combo in itertools.product(*per_atom):
        pairs = tuple(sorted(p for group in combo for p in group))
        for units in unit_choices:
            yield ExtendedLinking(pairs, units)


def partial_linkings(ps: ProofStructure, unit_insertion=False):
    """Depth-first linking enumeration that drops a branch as soon as some
    switching of the partial structure contains a cycle.

    Forgetting order and bracketing sends every proof to a multiplicative
    linear logic proof with the same axiom links, so every net is acyclic
    under all switchings, and adding identifications never removes a cycle.
    Components are grown Danos-style: tensor links join their tentacles, and
    a binary par joins once its two side tentacles meet. Output order matches
    enumerate_linkings restricted to the surviving linkings.
    """
    hg, cg, tl, tr = _grouped_ends(ps, unit_insertion)
    names = sorted(hg)
    slots = [(h, cg[n]) for n in names for h in hg[n]]
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    pars = []
    for l in ps.links.values():
        t = l.tentacles()
        if l.kind == TENSOR:
            for v in t[1:]:
                a, b = find(t[0]), find(v)
                if a != b:
                    parent[a] = b
        elif len(t) == 3:
            m = l.main
            pars.append((m,) + tuple(v for v in t if v != m))

    def settle(open_pars):
        # collapse pars whose sides meet; None signals a switching cycle
        changed = True
        while changed:
            changed = False
            rest = []
            for m, s1, s2 in open_pars:
                fm, f1, f2 = find(m), find(s1), find(s2)
                if fm == f1 or fm == f2:
                    return None
                if f1 == f2:
                    parent[fm] = f1
                    changed = True
                else:
                    rest.append((m, s1, s2))
            open_pars = rest
        return open_pars

    start = settle(pars)
    if start is None:
        return
    unit_choices = [tuple(zip(tl, perm)) for perm in itertools.permutations(tr, len(tl))]
    used = set()
    chosen = []

    def rec(i, open_pars):
        if i == len(slots):
            pairs = tuple(sorted(chosen))
            for units in unit_choices:
                yield ExtendedLinking(pairs, units)
            return
        h, cands = slots[i]
        for c in cands:
            if c in used:
                continue
            a, b = find(h), find(c)
            if a == b:
                continue
            saved = dict(parent)
            parent[a] = b
            nxt = settle(open_pars)
            if nxt is not None:
                used.add(c)
                chosen.append((h, c))
                yield from rec(i + 1, nxt)
                chosen.pop()
                used.discard(c)
            parent.clear()
            parent.update(saved)

    yield from rec(0, start)


def apply_linking(ps: ProofStructure, e: ExtendedLinking) -> ProofStructure:
    """Identify each conclusion end with its hypothesis end (the smaller id survives)."""
    formulas = dict(ps.formulas)
    links = dict(ps.links)
    hyps = list(ps.hypotheses)
    goal = ps.goal
    hyp_ends, con_ends = ps.open_ends()
    seen_h, seen_c = set(), set()
    for h, c in e.atom_pairs:
        if h not in hyp_ends or c not in con_ends or h in seen_h or c in seen_c:
            raise MalformedStructure(f"bad axiom pair {(h, c)}")
        if formulas[h] != formulas[c]:
            raise MalformedStructure(f"axiom pair {(h, c)} joins different atoms")
        seen_h.add(h)
        seen_c.add(c)
    if len(seen_h) != len(hyp_ends) or len(seen_c) != len(con_ends):
        raise MalformedStructure("linking is not total")
    rename = {}
    for h, c in e.atom_pairs:
        keep, drop = min(h, c), max(h, c)
        rename[drop] = keep
    for drop, keep in rename.items():
        del formulas[drop]
    for lid, l in links.items():
        if any(v in rename for v in l.tentacles()):
            links[lid] = dc_replace(l, premisses=tuple(rename.get(v, v) for v in l.premisses),
                                    conclusions=tuple(rename.get(v, v) for v in l.conclusions))
    hyps = [rename.get(v, v) for v in hyps]
    goal = rename.get(goal, goal)
    out = ProofStructure(formulas, links, hyps, list(ps.words), goal, dict(e.unit_pairs), True)
    out.above()
    out.below()
    return out


def hypotheses_and_conclusions(ps: ProofStructure):
    """Formula listing (hypotheses, conclusions) in vertex order."""
    return ([ps.formulas[v] for v in ps.hypothesis_vertices()],
            [ps.formulas[v] for v in ps.conclusion_vertices()])
