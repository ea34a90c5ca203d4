"""Abstract proof structures: links over vertices, with hypothesis and
conclusion labels on the open vertices."""
from __future__ import annotations

import json
from typing import Optional

from .formula import parse_formula, print_formula
from .proofnet import STRUCTURAL, Link, MalformedStructure, ProofStructure, PAR_SHAPES
from .structure import CComp, Comp, FLeaf, Lam, One, Var, ONE

CATEGORIES = ("TensorTree", "TensorGraph", "HasParLinks", "Cyclic", "Disconnected")


class APS:
    """Mutable abstract proof structure.

    `h` labels vertices that are no link's conclusion, `c` labels vertices that
    are no link's premiss. `words` maps lexical hypothesis vertices to words.
    """

    def __init__(self, vertices=(), links=None, h=None, c=None, words=None, word_order=None,
                 unit_pairs=None, alphabet="nllam"):
        self.vertices = set(vertices)
        self.links = dict(links or {})
        self.h = dict(h or {})
        self.c = dict(c or {})
        self.words = dict(words or {})
        self.word_order = list(word_order or [])
        self.unit_pairs = dict(unit_pairs or {})
        self.alphabet = alphabet
        self.merged = {}
        self._reindex()

    def _reindex(self):
        self._above, self._below = {}, {}
        for l in self.links.values():
            for v in l.conclusions:
                if v in self._above:
                    raise MalformedStructure(f"vertex {v} is twice a conclusion")
                self._above[v] = l.id
            for v in l.premisses:
                if v in self._below:
                    raise MalformedStructure(f"vertex {v} is twice a premiss")
                self._below[v] = l.id

    def copy(self):
        g = APS.__new__(APS)
        g.vertices = set(self.vertices)
        g.links = dict(self.links)
        g.h = dict(self.h)
        g.c = dict(self.c)
        g.words = dict(self.words)
        g.word_order = list(self.word_order)
        g.unit_pairs = dict(self.unit_pairs)
        g.alphabet = self.alphabet
        g.merged = dict(self.merged)
        g._above = dict(self._above)
        g._below = dict(self._below)
        return g

    def above(self, v) -> Optional[Link]:
        lid = self._above.get(v)
        return None if lid is None else self.links[lid]

    def below(self, v) -> Optional[Link]:
        lid = self._below.get(v)
        return None if lid is None else self.links[lid]

    def resolve(self, v):
        while v in self.merged:
            v = self.merged[v]
        return v

    def par_links(self):
        return [l for l in self.links.values() if l.shape in PAR_SHAPES]

    def size(self):
        return sum(2 if l.shape in PAR_SHAPES else 1 for l in self.links.values())

    def roots(self):
        return sorted(v for v in self.vertices if v not in self._below)

    def root(self):
        r = self.roots()
        if len(r) != 1:
            raise MalformedStructure(f"expected one root, found {r}")
        return r[0]

    # mutation helpers used by the rewrite engine

    def add_link(self, link):
        self.links[link.id] = link
        for v in link.conclusions:
            self._above[v] = link.id
        for v in link.premisses:
            self._below[v] = link.id

    def remove_link(self, lid):
        l = self.links.pop(lid)
        for v in l.conclusions:
            if self._above.get(v) == lid:
                del self._above[v]
        for v in l.premisses:
            if self._below.get(v) == lid:
                del self._below[v]
        return l

    def delete_vertex(self, v):
        self.vertices.discard(v)
        self.h.pop(v, None)
        self.c.pop(v, None)

    def _rename(self, old, new):
        for lid in {self._above.get(old), self._below.get(old)} - {None}:
            l = self.links[lid].rename(old, new)
            self.links[lid] = l
        if old in self._above:
            self._above[new] = self._above.pop(old)
        if old in self._below:
            self._below[new] = self._below.pop(old)

    def identify(self, upper, lower):
        """Merge `upper` (keeps what lies above it) with `lower` (keeps what lies below)."""
        if upper == lower:
            return upper
        if upper in self._below or lower in self._above:
            raise MalformedStructure(f"cannot identify {upper} with {lower}")
        new = min(upper, lower)
        hl = self.h.pop(upper, None)
        cl = self.c.pop(lower, None)
        self.h.pop(lower, None)
        self.c.pop(upper, None)
        word = self.words.pop(upper, None)
        self.words.pop(lower, None)
        for old in (upper, lower):
            if old != new:
                self._rename(old, new)
                self.vertices.discard(old)
                self.merged[old] = new
        self.vertices.add(new)
        if new not in self._above and hl is not None:
            self.h[new] = hl
        if new not in self._below and cl is not None:
            self.c[new] = cl
        if word is not None:
            self.words[new] = word
        self.word_order = [new if v in (upper, lower) else v for v in self.word_order]
        return new

    # serialization

    def signature(self):
        """Exact (id-sensitive) key for memo tables."""
        return (frozenset((l.id, l.shape, l.premisses, l.conclusions) for l in self.links.values()),
                frozenset(self.vertices))

    def to_json(self):
        verts = []
        for v in sorted(self.vertices):
            d = {"id": v}
            if v in self.h:
                d["h"] = print_formula(self.h[v])
            if v in self.c:
                d["c"] = print_formula(self.c[v])
            if v in self.words:
                d["word"] = self.words[v]
            verts.append(d)
        links = []
        for l in sorted(self.links.values(), key=lambda l: l.id):
            d = {"id": l.id, "shape": l.shape, "premisses": list(l.premisses),
                 "conclusions": list(l.conclusions)}
            if l.main is not None:
                d["main"] = l.main
            if l.origin:
                d["origin"] = l.origin
            if l.formulas:
                d["formulas"] = [None if f is None else print_formula(f) for f in l.formulas]
            links.append(d)
        return {"alphabet": self.alphabet, "kind": "aps", "vertices": verts, "links": links,
                "word_order": list(self.word_order),
                "unit_pairs": [[a, b] for a, b in sorted(self.unit_pairs.items())]}

    @classmethod
    def from_json(cls, d):
        h, c, words, vs = {}, {}, {}, []
        for v in d["vertices"]:
            vs.append(v["id"])
            if "h" in v:
                h[v["id"]] = parse_formula(v["h"])
            if "c" in v:
                c[v["id"]] = parse_formula(v["c"])
            if "word" in v:
                words[v["id"]] = v["word"]
        links = {}
        for l in d["links"]:
            fs = tuple(None if f is None else parse_formula(f) for f in l.get("formulas", ()))
            links[l["id"]] = Link(l["id"], l["shape"], tuple(l["premisses"]), tuple(l["conclusions"]),
                                  l.get("origin"), fs)
        return cls(vs, links, h, c, words, d.get("word_order", []),
                   {a: b for a, b in d.get("unit_pairs", [])}, d.get("alphabet", "nllam"))

    def dumps(self):
        return json.dumps(self.to_json(), ensure_ascii=False, indent=1)


def to_aps(ps: ProofStructure) -> APS:
    """Forget the formulas on internal vertices; tensor links become ∘, ⊚ or 1."""
    ab, be = ps.above(), ps.below()
    links = {}
    for l in ps.links.values():
        shape = STRUCTURAL.get(l.shape, l.shape)
        links[l.id] = Link(l.id, shape, l.premisses, l.conclusions, l.shape, l.formulas)
    h = {v: f for v, f in ps.formulas.items() if v not in ab}
    c = {v: f for v, f in ps.formulas.items() if v not in be}
    words = {v: w for v, w in zip(ps.hypotheses, ps.words) if w is not None}
    return APS(ps.formulas.keys(), links, h, c, words, ps.hypotheses, ps.unit_pairs)


def tensor_path(g: APS, src, dst) -> bool:
    """Is there a downward path from src to dst through tensor links only?
    Through a λ link only the premiss to result direction counts."""
    v = src
    seen = set()
    while v not in seen:
        if v == dst:
            return True
        seen.add(v)
        l = g.below(v)
        if l is None or l.shape in PAR_SHAPES:
            return False
        if l.shape in ("λ", "λt"):
            if l.premisses[0] != v:
                return False
            v = l.conclusions[1] if l.shape == "λ" else l.conclusions[0]
        else:
            v = l.conclusions[0]
    return False


def _lambda_var(l):
    return l.conclusions[0] if l.shape == "λ" else l.conclusions[1]


def classify(g: APS) -> str:
    if g.par_links():
        return "HasParLinks"
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    nodes = [("v", v) for v in g.vertices] + [("l", lid) for lid in g.links]
    cyclic = False
    for l in g.links.values():
        tentacles = list(l.tentacles())
        if l.shape in ("λ", "λt"):
            # the binding edge is not a tree edge
            tentacles.pop(len(l.premisses) + l.conclusions.index(_lambda_var(l)))
        for v in tentacles:
            a, b = find(("l", l.id)), find(("v", v))
            if a == b:
                cyclic = True
            else:
                parent[a] = b
    if cyclic:
        return "Cyclic"
    if len({find(n) for n in nodes}) > 1:
        return "Disconnected"
    lams = [l for l in g.links.values() if l.shape in ("λ", "λt")]
    for l in lams:
        # a binder whose variable escapes its body is a cycle once the binding edge is counted
        if not tensor_path(g, _lambda_var(l), l.premisses[0]):
            return "Cyclic"
    return "TensorGraph" if lams else "TensorTree"


def var_name(lid):
    return f"x{lid}"


def to_structure(g: APS, with_paths=False):
    """Read a tensor tree or tensor graph as a structure."""
    cat = classify(g)
    if cat not in ("TensorTree", "TensorGraph"):
        raise MalformedStructure(f"not a tensor graph: {cat}")
    paths = {}
    var_of = {}
    for l in g.links.values():
        if l.shape == "λ":
            var_of[l.conclusions[0]] = var_name(l.id)

    def build(v, path):
        paths[v] = path
        if v in var_of:
            return Var(var_of[v])
        l = g.above(v)
        if l is None:
            return FLeaf(g.h.get(v), g.words.get(v))
        if l.shape == "1":
            return ONE
        if l.shape in ("∘", "⊚"):
            ctor = Comp if l.shape == "∘" else CComp
            return ctor(build(l.premisses[0], path + (0,)), build(l.premisses[1], path + (1,)))
        if l.shape == "λ":
            return Lam(var_name(l.id), build(l.premisses[0], path + (0,)))
        raise MalformedStructure(f"link shape {l.shape} has no structure reading")

    s = build(g.root(), ())
    return (s, paths) if with_paths else s


def structure_to_aps(s, goal=None) -> APS:
    """Encode a structure as a tensor graph; leaves become hypothesis vertices in order."""
    g = APS()
    counter = {"v": 0, "l": 0}
    var_vertex = {}

    def vertex():
        counter["v"] += 1
        v = counter["v"] - 1
        g.vertices.add(v)
        return v

    def link(shape, prem, concl):
        lid = counter["l"]
        counter["l"] += 1
        g.add_link(Link(lid, shape, tuple(prem), tuple(concl)))
        return lid

    def enc(s):
        if isinstance(s, FLeaf):
            v = vertex()
            if s.formula is not None:
                g.h[v] = s.formula
            if s.origin is not None:
                g.words[v] = s.origin
            g.word_order.append(v)
            return v
        if isinstance(s, One):
            v = vertex()
            link("1", (), (v,))
            return v
        if isinstance(s, Var):
            return var_vertex[s.name]
        if isinstance(s, (Comp, CComp)):
            a = enc(s.left)
            b = enc(s.right)
            v = vertex()
            link("∘" if isinstance(s, Comp) else "⊚", (a, b), (v,))
            return v
        if isinstance(s, Lam):
            x = vertex()
            var_vertex[s.var] = x
            body = enc(s.body)
            v = vertex()
            link("λ", (body,), (x, v))
            return v
        raise TypeError(s)

    root = enc(s)
    if goal is not None:
        g.c[root] = goal
    return g
