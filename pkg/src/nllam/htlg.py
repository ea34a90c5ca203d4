"""Hybrid type-logical grammar term graphs and their mirror translation to NLλ.

HTLG links: "+" concatenation, "@" application with premisses [function,
argument], "λt" binder with premiss body and conclusions [result, variable],
"λpar" (the ⊸ introduction par) with conclusions [main, hypothesis], and the
0-ary "ε". Lambek par links keep their NLλ shapes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .aps import APS, tensor_path, to_aps
from .formula import (Atom, CLDiv, CProd, CRDiv, Formula, LDiv, Polarity, Prod, RDiv, UNIT, Unit,
                      parse_formula, print_formula)
from .proofnet import Link, MalformedStructure, ProofStructure, _Builder


class Untranslatable(ValueError):
    def __init__(self, link):
        super().__init__(f"link {link.id} ({link.shape}) has no counterpart across the translation")
        self.link = link


class TermSyntaxError(ValueError):
    pass


# -- formulas with linear implication ---------------------------------------

@dataclass(frozen=True)
class Lin:
    """A ⊸ B."""
    arg: object
    res: object

    def __str__(self):
        return print_htlg_formula(self)


def print_htlg_formula(f) -> str:
    if isinstance(f, Lin):
        a = print_htlg_formula(f.arg)
        if isinstance(f.arg, Lin):
            a = f"({a})"
        return f"{a} -o {print_htlg_formula(f.res)}"
    s = print_formula(f)
    return s


def parse_htlg_formula(text: str):
    """Lambek formulas plus right-associative "-o" for linear implication."""
    text = text.strip()
    depth = 0
    for i in range(len(text) - 1):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith("-o", i):
            return Lin(parse_htlg_formula(text[:i]), parse_htlg_formula(text[i + 2:]))
    if text.startswith("(") and _closing(text, 0) == len(text) - 1 and "-o" in text:
        return parse_htlg_formula(text[1:-1])
    return parse_formula(text)


def _closing(text, i):
    depth = 0
    for j in range(i, len(text)):
        if text[j] == "(":
            depth += 1
        elif text[j] == ")":
            depth -= 1
            if depth == 0:
                return j
    raise TermSyntaxError(f"unbalanced parentheses in {text!r}")


# -- prosodic terms ---------------------------------------------------------

@dataclass(frozen=True)
class TWord:
    word: str


@dataclass(frozen=True)
class TEps:
    pass


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TApp:
    fun: object
    arg: object


@dataclass(frozen=True)
class TCat:
    left: object
    right: object


@dataclass(frozen=True)
class TLam:
    var: str
    body: object


_TERM_TOKEN = re.compile(r"\s*(λ|\\|\.|\(|\)|\+|ε|[A-Za-z_][A-Za-z0-9_']*)")


def parse_term(text: str):
    """Terms: words, ε, bound variables, (M N), M + N (right-nested), λx.M."""
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TERM_TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character at {pos} in {text!r}")
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def eat(t=None):
        nonlocal i
        tok = peek()
        if tok is None or (t is not None and tok != t):
            raise TermSyntaxError(f"expected {t or 'a token'} in {text!r}")
        i += 1
        return tok

    def term(bound):
        left = app(bound)
        if peek() == "+":
            eat("+")
            return TCat(left, term(bound))
        return left

    def app(bound):
        f = atom(bound)
        while peek() not in (None, ")", "+"):
            f = TApp(f, atom(bound))
        return f

    def atom(bound):
        tok = peek()
        if tok == "(":
            eat("(")
            t = term(bound)
            eat(")")
            return t
        if tok in ("λ", "\\"):
            eat()
            v = eat()
            eat(".")
            return TLam(v, term(bound | {v}))
        if tok == "ε":
            eat()
            return TEps()
        if tok is None or tok in (")", "+", "."):
            raise TermSyntaxError(f"unexpected {tok!r} in {text!r}")
        eat()
        return TVar(tok) if tok in bound else TWord(tok)

    t = term(frozenset())
    if i != len(toks):
        raise TermSyntaxError(f"trailing input in {text!r}")
    return t


# -- building term graphs ---------------------------------------------------

class _GraphBuilder:
    def __init__(self):
        self.g = APS(alphabet="htlg")
        self.nv = 0
        self.nl = 0

    def vertex(self):
        v = self.nv
        self.nv += 1
        self.g.vertices.add(v)
        return v

    def link(self, shape, prem, concl, formulas=()):
        lid = self.nl
        self.nl += 1
        self.g.add_link(Link(lid, shape, tuple(prem), tuple(concl), None, tuple(formulas)))
        return lid

    def unfold(self, f, pol, root, labels, opaque):
        """Unfold f at root; labels collects formulas for every vertex."""
        labels[root] = f
        if isinstance(f, Atom) or f in opaque:
            return
        hyp = pol is Polarity.HYPOTHESIS
        H, C = Polarity.HYPOTHESIS, Polarity.CONCLUSION
        if isinstance(f, Lin):
            va, vr = self.vertex(), self.vertex()
            if hyp:
                self.link("@", (root, va), (vr,))
                self.unfold(f.arg, C, va, labels, opaque)
                self.unfold(f.res, H, vr, labels, opaque)
            else:
                self.link("λpar", (vr,), (root, va))
                self.unfold(f.arg, H, va, labels, opaque)
                self.unfold(f.res, C, vr, labels, opaque)
        elif isinstance(f, Unit):
            if hyp:
                self.link("tL", (root,), ())
            else:
                self.link("ε", (), (root,))
        elif isinstance(f, (RDiv, LDiv)):
            res, arg = (f.left, f.right) if isinstance(f, RDiv) else (f.right, f.left)
            va, vr = self.vertex(), self.vertex()
            if hyp:
                prem = (root, va) if isinstance(f, RDiv) else (va, root)
                self.link("+", prem, (vr,))
                self.unfold(arg, C, va, labels, opaque)
                self.unfold(res, H, vr, labels, opaque)
            else:
                concl = (root, va) if isinstance(f, RDiv) else (va, root)
                self.link("/R" if isinstance(f, RDiv) else "\\R", (vr,), concl)
                self.unfold(arg, H, va, labels, opaque)
                self.unfold(res, C, vr, labels, opaque)
        elif isinstance(f, Prod):
            va, vb = self.vertex(), self.vertex()
            if hyp:
                self.link("•L", (root,), (va, vb))
                self.unfold(f.left, H, va, labels, opaque)
                self.unfold(f.right, H, vb, labels, opaque)
            else:
                self.link("+", (va, vb), (root,))
                self.unfold(f.left, C, va, labels, opaque)
                self.unfold(f.right, C, vb, labels, opaque)
        else:
            raise Untranslatable(Link(-1, type(f).__name__, (), ()))

    def term(self, t, env):
        if isinstance(t, TWord):
            v = self.vertex()
            self.g.words[v] = t.word
            self.g.word_order.append(v)
            return v
        if isinstance(t, TEps):
            v = self.vertex()
            self.link("ε", (), (v,))
            return v
        if isinstance(t, TVar):
            return env[t.name]
        if isinstance(t, (TApp, TCat)):
            a = self.term(t.fun if isinstance(t, TApp) else t.left, env)
            b = self.term(t.arg if isinstance(t, TApp) else t.right, env)
            v = self.vertex()
            self.link("@" if isinstance(t, TApp) else "+", (a, b), (v,))
            return v
        if isinstance(t, TLam):
            x = self.vertex()
            body = self.term(t.body, {**env, t.var: x})
            v = self.vertex()
            self.link("λt", (body,), (v, x))
            return v
        raise TypeError(t)


def lexical_termgraph(formula, term, goal=None, opaque=()) -> APS:
    """Unfold an HTLG lexical formula (as hypothesis) and plug its prosodic
    term graph into the lexical vertex."""
    f = parse_htlg_formula(formula) if isinstance(formula, str) else formula
    t = parse_term(term) if isinstance(term, str) else term
    opq = frozenset(parse_htlg_formula(o) if isinstance(o, str) else o for o in opaque)
    b = _GraphBuilder()
    labels = {}
    root = b.vertex()
    b.unfold(f, Polarity.HYPOTHESIS, root, labels, opq)
    top = b.term(t, {})
    g = b.g
    _label_open(g, labels)
    g.h.pop(root, None)
    g.identify(top, root)
    return g


def _label_open(g, labels):
    for v in g.vertices:
        if v in labels:
            if g.above(v) is None:
                g.h[v] = labels[v]
            if g.below(v) is None:
                g.c[v] = labels[v]


def lexical_aps(word, formula, opaque=()) -> APS:
    """NLλ abstract proof structure of one lexical formula, unlinked."""
    f = parse_formula(formula) if isinstance(formula, str) else formula
    opq = frozenset(parse_formula(o) if isinstance(o, str) else o for o in opaque)
    bld = _Builder()
    r = bld.vertex(f)
    bld.unfold(f, Polarity.HYPOTHESIS, r, opq)
    ps = ProofStructure(bld.formulas, bld.links, [r], [word], None)
    return to_aps(ps)


# -- β on term graphs -------------------------------------------------------

def find_beta_redexes(g: APS):
    out = []
    for T in sorted(g.links.values(), key=lambda l: l.id):
        if T.shape != "@":
            continue
        f = T.premisses[0]
        L = g.above(f)
        if L is not None and L.shape == "λt" and L.conclusions[0] == f:
            if tensor_path(g, L.conclusions[1], L.premisses[0]):
                out.append((T.id, L.id))
    return out


def beta_step(g: APS, redex) -> APS:
    g = g.copy()
    T, L = g.links[redex[0]], g.links[redex[1]]
    f, a = T.premisses
    c2 = T.conclusions[0]
    h2 = L.premisses[0]
    v = L.conclusions[1]
    g.remove_link(T.id)
    g.remove_link(L.id)
    g.delete_vertex(f)
    m = g.identify(a, v)
    if h2 == v:
        h2 = m
    g.identify(g.resolve(h2), c2)
    return g


def beta_reduce_termgraph(g: APS, max_steps=1000, with_count=False):
    """Contract @/λ redexes (smallest link id first) until none is left."""
    n = 0
    while True:
        reds = find_beta_redexes(g)
        if not reds:
            return (g, n) if with_count else g
        if n >= max_steps:
            raise RuntimeError(f"more than {max_steps} β steps")
        before = len(g.links)
        g = beta_step(g, reds[0])
        assert len(g.links) < before
        n += 1


# -- the mirror translation -------------------------------------------------

def _to_htlg(l: Link) -> Link:
    s = l.shape
    if s == "∘":
        return Link(l.id, "+", l.premisses, l.conclusions, l.origin)
    if s == "⊚":
        return Link(l.id, "@", l.premisses[::-1], l.conclusions, l.origin)
    if s == "λ":
        return Link(l.id, "λt", l.premisses, l.conclusions[::-1], l.origin)
    if s == "⤈R":
        return Link(l.id, "λpar", l.premisses, l.conclusions[::-1], l.origin)
    if s == "1":
        return Link(l.id, "ε", l.premisses, l.conclusions, l.origin)
    if s in ("/R", "\\R", "•L"):
        return Link(l.id, s, l.premisses, l.conclusions, l.origin)
    raise Untranslatable(l)


def _to_nllam(l: Link) -> Link:
    s = l.shape
    if s == "+":
        return Link(l.id, "∘", l.premisses, l.conclusions, l.origin)
    if s == "@":
        return Link(l.id, "⊚", l.premisses[::-1], l.conclusions, l.origin)
    if s == "λt":
        return Link(l.id, "λ", l.premisses, l.conclusions[::-1], l.origin)
    if s == "λpar":
        return Link(l.id, "⤈R", l.premisses, l.conclusions[::-1], l.origin)
    if s == "ε":
        return Link(l.id, "1", l.premisses, l.conclusions, l.origin)
    if s in ("/R", "\\R", "•L"):
        return Link(l.id, s, l.premisses, l.conclusions, l.origin)
    raise Untranslatable(l)


def mirror_translate(g: APS) -> APS:
    """NLλ abstract proof structure to HTLG term graph, or back (by alphabet)."""
    conv, alpha = (_to_htlg, "htlg") if g.alphabet == "nllam" else (_to_nllam, "nllam")
    links = {lid: conv(l) for lid, l in g.links.items()}
    return APS(g.vertices, links, g.h, g.c, g.words, g.word_order, {}, alpha)


def _nx(g: APS):
    import networkx as nx
    G = nx.DiGraph()
    for v in g.vertices:
        G.add_node(("v", v), label=("v", g.words.get(v)))
    for l in g.links.values():
        G.add_node(("l", l.id), label=("l", l.shape))
        for i, v in enumerate(l.premisses):
            G.add_edge(("v", v), ("l", l.id), slot=("p", i))
        for i, v in enumerate(l.conclusions):
            G.add_edge(("l", l.id), ("v", v), slot=("c", i))
    return G


def isomorphic_mirror(a: APS, b: APS) -> bool:
    """Do a (NLλ) and b (HTLG) coincide under the mirror? Vertex ids and
    formula labels are ignored; words must match."""
    import networkx as nx
    try:
        ta = mirror_translate(a) if a.alphabet == "nllam" else a
    except Untranslatable:
        return False
    return nx.is_isomorphic(_nx(ta), _nx(b), node_match=lambda x, y: x["label"] == y["label"],
                            edge_match=lambda x, y: x["slot"] == y["slot"])


# -- reading a lexical formula back from an NLλ structure -------------------

def read_back_formula(g: APS, v) -> Formula:
    """Formula for hypothesis vertex v of a par-main-consistent NLλ structure."""
    return _hyp(g, v, set())


def _hyp(g, v, seen):
    if v in seen:
        raise MalformedStructure("cycle while reading a formula")
    seen = seen | {v}
    L = g.below(v)
    if L is None:
        if v not in g.c:
            raise MalformedStructure(f"vertex {v} has no conclusion formula")
        return g.c[v]
    if L.shape in ("∘", "⊚"):
        p0, p1 = L.premisses
        c = L.conclusions[0]
        right, left = (RDiv, LDiv) if L.shape == "∘" else (CRDiv, CLDiv)
        if v == p0:
            return right(_hyp(g, c, seen), _con(g, p1, seen))
        return left(_con(g, p0, seen), _hyp(g, c, seen))
    if L.shape in ("•L", "⊙L") and L.premisses[0] == v:
        x, y = L.conclusions
        ctor = Prod if L.shape == "•L" else CProd
        return ctor(_hyp(g, x, seen), _hyp(g, y, seen))
    if L.shape == "tL":
        return UNIT
    raise MalformedStructure(f"link {L.id} ({L.shape}) does not fit a formula read from vertex {v}")


def _con(g, v, seen):
    if v in seen:
        raise MalformedStructure("cycle while reading a formula")
    seen = seen | {v}
    L = g.above(v)
    if L is None:
        if v not in g.h:
            raise MalformedStructure(f"vertex {v} has no hypothesis formula")
        return g.h[v]
    if L.shape in ("∘", "⊚"):
        ctor = Prod if L.shape == "∘" else CProd
        return ctor(_con(g, L.premisses[0], seen), _con(g, L.premisses[1], seen))
    if L.shape == "1":
        return UNIT
    if L.is_par and L.main == v:
        p = L.premisses[0]
        if L.shape in ("/R", "⤉R"):
            ctor = RDiv if L.shape == "/R" else CRDiv
            return ctor(_con(g, p, seen), _hyp(g, L.conclusions[1], seen))
        if L.shape in ("\\R", "⤈R"):
            ctor = LDiv if L.shape == "\\R" else CLDiv
            return ctor(_hyp(g, L.conclusions[0], seen), _con(g, p, seen))
    raise MalformedStructure(f"link {L.id} ({L.shape}) does not fit a formula read at vertex {v}")
