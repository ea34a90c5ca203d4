"""Conversions on abstract proof structures, normalization and sequentialization."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .aps import APS, classify, tensor_path, to_aps, to_structure, var_name
from .proofnet import Link, ProofStructure, apply_linking
from .sequent_calculus import SequentProof
from .structure import (CComp, Comp, FLeaf, Lam, ONE, Sequent, Var, alpha_equal, replace, subterm)

CONTRACTIONS = ("/R", "\\R", "•L", "⤉R", "⤈R", "⊙L", "tL")
STRUCTURAL_STEPS = ("β", "1∘", "∘1", "η")
DERIVED_RULES = ("1∘⁻¹/", "∘1⁻¹\\", "β⁻¹⤈", "1∘t", "∘1t")
ALL_CONVERSIONS = CONTRACTIONS + STRUCTURAL_STEPS + DERIVED_RULES


class IllegalRedex(ValueError):
    pass


class MalformedTrace(ValueError):
    pass


class NonTermination(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineOptions:
    eta: bool = False
    allow_empty_antecedent: bool = False
    unit_insertion: bool = False
    max_steps: int = 10_000
    max_states: int = 100_000


@dataclass(frozen=True)
class Conversion:
    name: str
    links: tuple          # ids of the links the step consumes
    vertex: Optional[int] = None  # split vertex for 1∘t / ∘1t
    size_delta: int = 0
    involved: tuple = ()  # sorted vertex ids touched, used for tie-breaking

    def to_json(self):
        d = {"name": self.name, "links": list(self.links), "size_delta": self.size_delta}
        if self.vertex is not None:
            d["vertex"] = self.vertex
        return d

    @classmethod
    def from_json(cls, d):
        return cls(d["name"], tuple(d["links"]), d.get("vertex"), d.get("size_delta", 0))

    def key(self):
        return (self.name, self.links, self.vertex)


@dataclass
class RewriteTrace:
    start: APS
    steps: list = field(default_factory=list)
    end: Optional[APS] = None

    def sizes(self):
        """Size of the structure before each step and after the last one."""
        out = [self.start.size()]
        g = self.start
        for s in self.steps:
            g = apply(g, s)
            out.append(g.size())
        return out

    def to_json(self):
        sizes = self.sizes()
        steps = []
        for i, s in enumerate(self.steps):
            d = s.to_json()
            d["size_before"], d["size_after"] = sizes[i], sizes[i + 1]
            steps.append(d)
        return {"start": self.start.to_json(), "steps": steps,
                "end": None if self.end is None else self.end.to_json()}

    @classmethod
    def from_json(cls, d):
        start = APS.from_json(d["start"])
        end = None if d.get("end") is None else APS.from_json(d["end"])
        return cls(start, [Conversion.from_json(s) for s in d["steps"]], end)


def size(g: APS) -> int:
    """Two per par link, one per tensor link."""
    return g.size()


STRUCT_FOR = {"/R": "∘", "\\R": "∘", "•L": "∘", "⤉R": "⊚", "⤈R": "⊚", "⊙L": "⊚"}


def _conv(g, name, links, delta, vertex=None):
    inv = set()
    for lid in links:
        inv.update(g.links[lid].tentacles())
    if vertex is not None:
        inv.add(vertex)
    return Conversion(name, tuple(links), vertex, delta, tuple(sorted(inv)))


def find_redexes(g: APS, opts: EngineOptions = EngineOptions(), linking=None):
    """Every applicable conversion, contractions first by link id."""
    out = []
    reserved = set()
    if not opts.unit_insertion:
        reserved = {u for t, u in g.unit_pairs.items() if t in g.links and u in g.links}
    for P in sorted(g.par_links(), key=lambda l: l.id):
        s = P.shape
        if s in ("/R", "⤉R"):
            ab = P.premisses[0]
            c, b = P.conclusions
            T = g.above(ab)
            if T is not None and T.shape == STRUCT_FOR[s] and T.premisses[1] == b and ab != b:
                if T.premisses[0] != c:
                    out.append(_conv(g, s, (P.id, T.id), -3))
        elif s in ("\\R", "⤈R"):
            ab = P.premisses[0]
            b, c = P.conclusions
            T = g.above(ab)
            if T is not None and T.shape == STRUCT_FOR[s] and T.premisses[0] == b and ab != b:
                if T.premisses[1] != c:
                    out.append(_conv(g, s, (P.id, T.id), -3))
        elif s in ("•L", "⊙L"):
            h = P.premisses[0]
            x, y = P.conclusions
            T = g.below(x)
            if (T is not None and T.shape == STRUCT_FOR[s] and T.premisses == (x, y)
                    and T.conclusions[0] != h):
                out.append(_conv(g, s, (P.id, T.id), -3))
        elif s == "tL":
            h = P.premisses[0]
            if opts.unit_insertion:
                cands = [l for l in g.links.values() if l.shape == "1"]
            else:
                u = g.unit_pairs.get(P.id)
                cands = [g.links[u]] if u in g.links and g.links[u].shape == "1" else []
            for U in sorted(cands, key=lambda l: l.id):
                if U.conclusions[0] != h:
                    out.append(_conv(g, "tL", (P.id, U.id), -3))
    for T in sorted(g.links.values(), key=lambda l: l.id):
        if T.shape == "⊚":
            h1, r = T.premisses
            L = g.above(r)
            if L is not None and L.shape == "λ" and L.conclusions[1] == r:
                if tensor_path(g, L.conclusions[0], L.premisses[0]):
                    out.append(_conv(g, "β", (T.id, L.id), -2))
        elif T.shape == "∘":
            a, b = T.premisses
            for name, side in (("1∘", a), ("∘1", b)):
                U = g.above(side)
                if U is not None and U.shape == "1" and U.id not in reserved and a != b:
                    out.append(_conv(g, name, (T.id, U.id), -2))
        elif T.shape == "λ" and opts.eta:
            p = T.premisses[0]
            x, r = T.conclusions
            A = g.above(p)
            if A is not None and A.shape == "⊚" and A.premisses[0] == x and A.premisses[1] != x:
                out.append(_conv(g, "η", (T.id, A.id), -2))
    for P in sorted(g.par_links(), key=lambda l: l.id):
        if opts.allow_empty_antecedent:
            if P.shape == "/R" and P.premisses[0] == P.conclusions[1]:
                out.append(_conv(g, "1∘⁻¹/", (P.id,), -1))
            if P.shape == "\\R" and P.premisses[0] == P.conclusions[0]:
                out.append(_conv(g, "∘1⁻¹\\", (P.id,), -1))
        if P.shape == "⤈R" and tensor_path(g, P.conclusions[0], P.premisses[0]):
            out.append(_conv(g, "β⁻¹⤈", (P.id,), -1))
        if P.shape == "tL" and opts.unit_insertion:
            ht = P.premisses[0]
            for v in sorted(g.vertices):
                if v != ht and not tensor_path(g, v, ht):
                    out.append(_conv(g, "1∘t", (P.id,), -1, v))
                    out.append(_conv(g, "∘1t", (P.id,), -1, v))
    return out


def apply(g: APS, conv: Conversion, opts: Optional[EngineOptions] = None, checked=True) -> APS:
    """Apply one conversion to a copy of g.

    checked=False skips the legality test, for redexes just returned by
    find_redexes on the same graph.
    """
    check = opts or EngineOptions(eta=True, allow_empty_antecedent=True, unit_insertion=True)
    if not checked:
        legal = True
    elif conv.name in ("1∘t", "∘1t"):
        legal = conv.links[0] in g.links and g.links[conv.links[0]].shape == "tL" and check.unit_insertion \
            and conv.vertex in g.vertices and conv.vertex != g.links[conv.links[0]].premisses[0] \
            and not tensor_path(g, conv.vertex, g.links[conv.links[0]].premisses[0])
    else:
        legal = any(r.key() == conv.key() for r in find_redexes(g, check))
    if not legal:
        raise IllegalRedex(f"{conv.name} on links {conv.links} does not apply")
    g = g.copy()
    n = conv.name
    if n in ("/R", "⤉R", "\\R", "⤈R"):
        P, T = (g.links[i] for i in conv.links)
        ab = P.premisses[0]
        if n in ("/R", "⤉R"):
            c, b = P.conclusions
            h = T.premisses[0]
        else:
            b, c = P.conclusions
            h = T.premisses[1]
        g.remove_link(P.id)
        g.remove_link(T.id)
        g.delete_vertex(ab)
        g.delete_vertex(b)
        g.identify(h, c)
    elif n in ("•L", "⊙L"):
        P, T = (g.links[i] for i in conv.links)
        h = P.premisses[0]
        x, y = P.conclusions
        c = T.conclusions[0]
        g.remove_link(P.id)
        g.remove_link(T.id)
        g.delete_vertex(x)
        g.delete_vertex(y)
        g.identify(h, c)
    elif n == "tL":
        P, U = (g.links[i] for i in conv.links)
        h, c = P.premisses[0], U.conclusions[0]
        g.remove_link(P.id)
        g.remove_link(U.id)
        g.unit_pairs.pop(P.id, None)
        g.identify(h, c)
    elif n == "β":
        T, L = (g.links[i] for i in conv.links)
        h1, r = T.premisses
        c2 = T.conclusions[0]
        h2 = L.premisses[0]
        c1 = L.conclusions[0]
        g.remove_link(T.id)
        g.remove_link(L.id)
        g.delete_vertex(r)
        m = g.identify(h1, c1)
        if h2 == c1:
            h2 = m
        g.identify(g.resolve(h2), c2)
    elif n in ("1∘", "∘1"):
        T, U = (g.links[i] for i in conv.links)
        a = U.conclusions[0]
        h = T.premisses[1] if n == "1∘" else T.premisses[0]
        c = T.conclusions[0]
        g.remove_link(T.id)
        g.remove_link(U.id)
        g.delete_vertex(a)
        g.identify(h, c)
    elif n == "η":
        L, A = (g.links[i] for i in conv.links)
        p = L.premisses[0]
        x, r = L.conclusions
        gv = A.premisses[1]
        g.remove_link(L.id)
        g.remove_link(A.id)
        g.delete_vertex(p)
        g.delete_vertex(x)
        g.identify(gv, r)
    elif n in ("1∘⁻¹/", "∘1⁻¹\\"):
        P = g.links[conv.links[0]]
        p = P.premisses[0]
        c = P.main
        g.remove_link(P.id)
        g.delete_vertex(p)
        g.add_link(Link(P.id, "1", (), (c,), P.shape, (P.formula_of("c", 0 if n == "1∘⁻¹/" else 1),)))
    elif n == "β⁻¹⤈":
        P = g.links[conv.links[0]]
        g.remove_link(P.id)
        g.add_link(Link(P.id, "λ", P.premisses, P.conclusions, P.shape, P.formulas))
    elif n in ("1∘t", "∘1t"):
        P = g.links[conv.links[0]]
        ht = P.premisses[0]
        v = conv.vertex
        below = g.below(v)
        g.remove_link(P.id)
        g.unit_pairs.pop(P.id, None)
        bot = -1 - P.id
        if bot in g.vertices:
            raise IllegalRedex("split vertex id already in use")
        g.vertices.add(bot)
        if below is not None:
            g.remove_link(below.id)
            g.add_link(below.rename(v, bot))
        if v in g.c:
            g.c[bot] = g.c.pop(v)
        prem = (ht, v) if n == "1∘t" else (v, ht)
        g.add_link(Link(P.id, "∘", prem, (bot,), "tL"))
    else:
        raise IllegalRedex(f"unknown conversion {n}")
    return g


def replay(start: APS, steps) -> APS:
    g = start
    for s in steps:
        g = apply(g, s)
    return g


def _pick(redexes, rng):
    best = min(r.size_delta for r in redexes)
    top = [r for r in redexes if r.size_delta == best]
    if rng is None:
        return min(top, key=lambda r: (r.involved, r.name, r.links, r.vertex or 0))
    return rng.choice(sorted(top, key=lambda r: (r.involved, r.name, r.links)))


def normalize_eager(g: APS, opts: EngineOptions = EngineOptions(), linking=None, seed=None) -> RewriteTrace:
    """Greedy normalization: biggest size drop first, ties to the smallest
    involved vertex ids (or a seeded random pick)."""
    rng = random.Random(seed) if seed is not None else None
    trace = RewriteTrace(g, [])
    cur = g
    for _ in range(opts.max_steps):
        reds = [r for r in find_redexes(cur, opts) if r.name not in ("1∘t", "∘1t")]
        if not reds:
            trace.end = cur
            return trace
        r = _pick(reds, rng)
        before = cur.size()
        cur = apply(cur, r, opts, checked=False)
        if cur.size() >= before:
            raise NonTermination("a step did not shrink the structure")
        trace.steps.append(r)
    raise NonTermination(f"more than {opts.max_steps} steps")


def isomorphic(a: APS, b: APS, with_words=True) -> bool:
    import networkx as nx
    return nx.is_isomorphic(_nx_graph(a, with_words), _nx_graph(b, with_words),
                            node_match=lambda x, y: x.get("label") == y.get("label"),
                            edge_match=lambda x, y: x.get("slot") == y.get("slot"))


def _nx_graph(g: APS, with_words=True):
    import networkx as nx
    G = nx.DiGraph()
    for v in g.vertices:
        lab = ("v", str(g.h.get(v)), str(g.c.get(v)), g.words.get(v) if with_words else None)
        G.add_node(("v", v), label=lab)
    for l in g.links.values():
        G.add_node(("l", l.id), label=("l", l.shape))
        for i, v in enumerate(l.premisses):
            G.add_edge(("v", v), ("l", l.id), slot=("p", i))
        for i, v in enumerate(l.conclusions):
            G.add_edge(("l", l.id), ("v", v), slot=("c", i))
    return G


def normalize_exhaustive(g: APS, opts: EngineOptions = EngineOptions(), linking=None):
    """All normal forms reachable from g, one trace per isomorphism class."""
    results = []
    seen = set()
    stack = [(g, [])]
    while stack:
        cur, steps = stack.pop()
        sig = cur.signature()
        if sig in seen:
            continue
        seen.add(sig)
        if len(seen) > opts.max_states:
            raise NonTermination(f"more than {opts.max_states} states")
        reds = find_redexes(cur, opts)
        if not reds:
            if not any(isomorphic(cur, t.end) for t in results):
                results.append(RewriteTrace(g, steps, cur))
            continue
        for r in reversed(reds):
            stack.append((apply(cur, r, opts, checked=False), steps + [r]))
    return results


def search_trace(g: APS, opts: EngineOptions, accept, linking=None) -> Optional[RewriteTrace]:
    """Depth-first search for a conversion sequence whose result satisfies accept."""
    seen = set()
    stack = [(g, [])]
    while stack:
        cur, steps = stack.pop()
        sig = cur.signature()
        if sig in seen:
            continue
        seen.add(sig)
        if len(seen) > opts.max_states:
            raise NonTermination(f"more than {opts.max_states} states")
        if not cur.par_links() and accept(cur):
            return RewriteTrace(g, steps, cur)
        for r in reversed(find_redexes(cur, opts)):
            stack.append((apply(cur, r, opts, checked=False), steps + [r]))
    return None


def _is_graph(g):
    return classify(g) in ("TensorTree", "TensorGraph")


def is_proof_net(ps: ProofStructure, linking, opts: EngineOptions = EngineOptions()) -> Optional[RewriteTrace]:
    """A trace reaching a tensor graph, or None."""
    g = to_aps(apply_linking(ps, linking) if linking is not None else ps)
    if opts.unit_insertion:
        return search_trace(g, opts, _is_graph)
    t = normalize_eager(g, opts)
    return t if _is_graph(t.end) else None


# -- sequentialization ------------------------------------------------------

def _label_h(g, v):
    f = g.h.get(v)
    if f is None:
        raise MalformedTrace(f"vertex {v} has no hypothesis formula")
    return f


def _tentacle_formula(l, v, side):
    seq = l.premisses if side == "p" else l.conclusions
    return l.formula_of(side, seq.index(v))


def _formula_at(g, v):
    """Formula of a vertex: its conclusion label, else what the link above says."""
    if v in g.c:
        return g.c[v]
    l = g.above(v)
    if l is not None and l.formulas:
        return _tentacle_formula(l, v, "c")
    return g.h.get(v)


def _ax(f, word=None):
    return SequentProof("Ax", Sequent(FLeaf(f, word), f))


def _cut(d, g, focus):
    if g.rule == "Ax" and not focus:
        return d
    ant = replace(g.conclusion.antecedent, focus, d.conclusion.antecedent)
    return SequentProof("Cut", Sequent(ant, g.conclusion.succedent), [d, g], tuple(focus))


def _base(g: APS, v):
    """Sequent proof of the tensor tree above v (no conversions left)."""
    l = g.above(v)
    if l is None:
        return _ax(_label_h(g, v), g.words.get(v))
    if l.shape == "1":
        return SequentProof("tR", Sequent(ONE, _formula_at(g, v)))
    o = l.origin
    p1, p2 = l.premisses
    d1, d2 = _base(g, p1), _base(g, p2)
    F1, F2, FC = l.formulas
    ctor = Comp if l.shape == "∘" else CComp
    if o in ("•R", "⊙R"):
        ant = ctor(d1.conclusion.antecedent, d2.conclusion.antecedent)
        return SequentProof(o, Sequent(ant, FC), [d1, d2])
    if o in ("/L", "⤉L"):
        fun = d1.conclusion.antecedent if g.above(p1) is None else FLeaf(F1)
        inner = SequentProof(o, Sequent(ctor(fun, d2.conclusion.antecedent), FC), [d2, _ax(FC)], ())
        return inner if g.above(p1) is None else _cut(d1, inner, (0,))
    if o in ("\\L", "⤈L"):
        fun = d2.conclusion.antecedent if g.above(p2) is None else FLeaf(F2)
        inner = SequentProof(o, Sequent(ctor(d1.conclusion.antecedent, fun), FC), [d1, _ax(FC)], ())
        return inner if g.above(p2) is None else _cut(d2, inner, (1,))
    raise MalformedTrace(f"link {l.id} ({l.shape}, origin {o}) cannot start a sequent proof")


def _side_split(start: APS, steps, P):
    """Partition start minus P into the components the last step joins.

    Components of start minus P are merged whenever a step touches links (or
    a vertex) from several of them.
    """
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[a] = b

    for l in start.links.values():
        if l.id == P.id:
            continue
        for v in l.tentacles():
            union(("l", l.id), ("v", v))
    # replay to learn which current vertex ids stand for which start vertices
    g = start
    for s in steps:
        nodes = [("l", i) for i in s.links if i != P.id]
        if s.vertex is not None:
            nodes.append(("v", g.resolve(s.vertex)))
        for a in nodes[1:]:
            union(nodes[0], a)
        g2 = apply(g, s)
        for old, new in g2.merged.items():
            if old not in g.merged:
                union(("v", old), ("v", new))
        g = g2
    return find, g


def _restrict(start: APS, find, root, P, extra_h=None, extra_c=None):
    keep_v = {v for v in start.vertices if find(("v", v)) == root}
    keep_l = {i: l for i, l in start.links.items() if i != P.id and find(("l", i)) == root}
    h = {v: f for v, f in start.h.items() if v in keep_v}
    c = {v: f for v, f in start.c.items() if v in keep_v}
    h.update(extra_h or {})
    c.update(extra_c or {})
    sub = APS(keep_v, keep_l, h, c, {v: w for v, w in start.words.items() if v in keep_v},
              [v for v in start.word_order if v in keep_v],
              {t: u for t, u in start.unit_pairs.items() if t in keep_l})
    return sub


def _sub_steps(steps, sub_links, P):
    out = []
    links = set(sub_links)
    for s in steps:
        ids = [i for i in s.links if i != P.id]
        if ids and all(i in links for i in ids) or (not ids and s.links[0] in links):
            out.append(s)
            links.update(s.links)
    return out


def _seq(start: APS, steps):
    if not steps:
        return _base(start, start.root())
    last = steps[-1]
    prefix = steps[:-1]
    before = replay(start, prefix)
    if last.name in STRUCTURAL_STEPS:
        d = _seq(start, prefix)
        after = apply(before, last)
        _, paths = to_structure(before, with_paths=True)
        T = before.links[last.links[0]]
        if last.name == "η":
            focus = paths[T.conclusions[1]]
        else:
            focus = paths[T.conclusions[0]]
        ant = to_structure(after)
        rule = {"β": "β", "1∘": "1∘", "∘1": "∘1", "η": "η"}[last.name]
        return SequentProof(rule, Sequent(ant, d.conclusion.succedent), [d], focus)
    P = before.links[last.links[0]]
    P0 = start.links.get(P.id)
    if P0 is None or P0.shape != P.shape:
        raise MalformedTrace(f"par link {P.id} is not from the start structure")
    find, _ = _side_split(start, prefix, P0)
    n = last.name

    def sub(v, extra_h=None, extra_c=None):
        root = find(("v", v))
        s = _restrict(start, find, root, P0, extra_h, extra_c)
        return s, _sub_steps(prefix, s.links, P0)

    def prove_side(v, extra_h=None, extra_c=None):
        s, st = sub(v, extra_h, extra_c)
        d = _seq(s, st)
        end = replay(s, st)
        return d, end

    if n in ("/R", "⤉R", "\\R", "⤈R", "•L", "⊙L"):
        fs = P0.formulas
        if n in ("•L", "⊙L"):
            h = P0.premisses[0]
            x, y = P0.conclusions
            d_up, _ = prove_side(h, extra_c={h: fs[0]})
            d_dn, end = prove_side(x, extra_h={x: fs[1], y: fs[2]})
            T = end.links[last.links[1]]
            _, paths = to_structure(end, with_paths=True)
            focus = paths[T.conclusions[0]]
            ant = replace(d_dn.conclusion.antecedent, focus, FLeaf(fs[0]))
            left = SequentProof(n, Sequent(ant, d_dn.conclusion.succedent), [d_dn], focus)
            return _cut(d_up, left, focus)
        ab = P0.premisses[0]
        if n in ("/R", "⤉R"):
            c, b = P0.conclusions
            Fm, Fb = fs[1], fs[2]
        else:
            b, c = P0.conclusions
            Fb, Fm = fs[1], fs[2]
        d_arg, _ = prove_side(ab, extra_h={b: Fb}, extra_c={ab: fs[0]})
        right = SequentProof(n, Sequent(_strip_arg(n, d_arg.conclusion.antecedent), Fm), [d_arg])
        d_main, end = prove_side(c, extra_h={c: Fm})
        _, paths = to_structure(end, with_paths=True)
        return _cut(right, d_main, paths[end.resolve(c)])
    if n == "tL":
        h = P0.premisses[0]
        d_up, _ = prove_side(h, extra_c={h: P0.formulas[0]})
        U = start.links[last.links[1]]
        d_dn, end = prove_side(U.conclusions[0])
        _, paths = to_structure(end, with_paths=True)
        focus = paths[end.resolve(U.conclusions[0])]
        ant = replace(d_dn.conclusion.antecedent, focus, FLeaf(P0.formulas[0]))
        left = SequentProof("tL", Sequent(ant, d_dn.conclusion.succedent), [d_dn], focus)
        return _cut(d_up, left, focus)
    if n in ("1∘⁻¹/", "∘1⁻¹\\"):
        B = P0.formulas[0]
        Fm = P0.formulas[1] if n == "1∘⁻¹/" else P0.formulas[2]
        c = P0.main
        unit = Comp(ONE, FLeaf(B)) if n == "1∘⁻¹/" else Comp(FLeaf(B), ONE)
        ins = SequentProof(n[:4], Sequent(unit, B), [_ax(B)], ())
        right = SequentProof("/R" if n == "1∘⁻¹/" else "\\R", Sequent(ONE, Fm), [ins])
        d_main, end = prove_side(c, extra_h={c: Fm})
        _, paths = to_structure(end, with_paths=True)
        return _cut(right, d_main, paths[end.resolve(c)])
    if n == "β⁻¹⤈":
        h = P0.premisses[0]
        c1, c2 = P0.conclusions
        C, A, Fm = P0.formulas
        d_arg, end_arg = prove_side(h, extra_h={c1: A}, extra_c={h: C})
        _, paths = to_structure(end_arg, with_paths=True)
        x = var_name(P0.id)
        body = replace(d_arg.conclusion.antecedent, paths[end_arg.resolve(c1)], Var(x))
        lam = Lam(x, body)
        inv = SequentProof("β⁻¹", Sequent(CComp(FLeaf(A), lam), C), [d_arg], ())
        right = SequentProof("⤈R", Sequent(lam, Fm), [inv])
        d_main, end = prove_side(c2, extra_h={c2: Fm})
        _, paths = to_structure(end, with_paths=True)
        return _cut(right, d_main, paths[end.resolve(c2)])
    if n in ("1∘t", "∘1t"):
        ht = P0.premisses[0]
        d_t, _ = prove_side(ht, extra_c={ht: P0.formulas[0]})
        v = last.vertex
        # find the start-side of v through the replay
        s, st = None, None
        for cand in start.vertices:
            if find(("v", cand)) != find(("v", ht)):
                sub_aps, sub_st = sub(cand)
                end = replay(sub_aps, sub_st)
                if v in end.vertices:
                    s, st = sub_aps, sub_st
                    break
        if s is None:
            raise MalformedTrace("split vertex not found")
        d_v = _seq(s, st)
        end = replay(s, st)
        _, paths = to_structure(end, with_paths=True)
        pv = paths[v]
        inner = subterm(d_v.conclusion.antecedent, pv)
        if n == "1∘t":
            wrapped, tpos = Comp(ONE, inner), pv + (0,)
        else:
            wrapped, tpos = Comp(inner, ONE), pv + (1,)
        goal = d_v.conclusion.succedent
        ins = SequentProof(n[:2] + "⁻¹", Sequent(replace(d_v.conclusion.antecedent, pv, wrapped), goal), [d_v], pv)
        tl = SequentProof("tL", Sequent(replace(ins.conclusion.antecedent, tpos, FLeaf(P0.formulas[0])), goal),
                          [ins], tpos)
        return _cut(d_t, tl, tpos)
    raise MalformedTrace(f"cannot sequentialize step {n}")


def _strip_arg(rule, ant):
    """Premiss Γ∘B (or A∘Γ) of a right rule gives Γ."""
    if rule in ("/R", "⤉R"):
        return ant.left
    return ant.right


def sequentialize(trace: RewriteTrace, ps: Optional[ProofStructure] = None) -> SequentProof:
    """Turn a conversion sequence ending in a tensor graph into a sequent proof
    of (end structure) ⊢ (goal formula)."""
    end = trace.end if trace.end is not None else replay(trace.start, trace.steps)
    if not _is_graph(end):
        raise MalformedTrace("trace does not end in a tensor graph")
    proof = _seq(trace.start, list(trace.steps))
    want = to_structure(end)
    if not alpha_equal(proof.conclusion.antecedent, want):
        raise MalformedTrace("sequentialized proof does not match the trace's end")
    return proof
