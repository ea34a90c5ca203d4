"""Antecedent structures, sequents and alpha-equivalence."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional

from .formula import Formula, Unit, print_formula, _TOKEN, FormulaSyntaxError


class NotLambekTree(ValueError):
    pass


class Structure:
    __slots__ = ()

    def __str__(self):
        return print_structure(self)


@dataclass(frozen=True)
class FLeaf(Structure):
    formula: Formula
    origin: Optional[str] = None


@dataclass(frozen=True)
class One(Structure):
    pass


ONE = One()


@dataclass(frozen=True)
class Var(Structure):
    name: str


@dataclass(frozen=True)
class Comp(Structure):
    left: Structure
    right: Structure


@dataclass(frozen=True)
class CComp(Structure):
    left: Structure
    right: Structure


@dataclass(frozen=True)
class Lam(Structure):
    var: str
    body: Structure


@dataclass(frozen=True)
class Sequent:
    antecedent: Structure
    succedent: Formula

    def __str__(self):
        return f"{print_structure(self.antecedent)} => {print_formula(self.succedent)}"


# -- traversal ---------------------------------------------------------------

def children(s):
    if isinstance(s, (Comp, CComp)):
        return (s.left, s.right)
    if isinstance(s, Lam):
        return (s.body,)
    return ()


def rebuild(s, kids):
    if isinstance(s, Comp):
        return Comp(*kids)
    if isinstance(s, CComp):
        return CComp(*kids)
    if isinstance(s, Lam):
        return Lam(s.var, kids[0])
    return s


def subterm(s, path):
    for i in path:
        s = children(s)[i]
    return s


def replace(s, path, new):
    """Return s with the subterm at path replaced by new."""
    if not path:
        return new
    kids = list(children(s))
    kids[path[0]] = replace(kids[path[0]], path[1:], new)
    return rebuild(s, kids)


def positions(s, prefix=()):
    """Yield (path, subterm) in pre-order."""
    yield prefix, s
    for i, k in enumerate(children(s)):
        yield from positions(k, prefix + (i,))


def size(s) -> int:
    return 1 + sum(size(k) for k in children(s))


def leaves(s):
    return [t for _, t in positions(s) if isinstance(t, FLeaf)]


def var_occurrences(s, acc=None):
    acc = {} if acc is None else acc
    if isinstance(s, Var):
        acc[s.name] = acc.get(s.name, 0) + 1
    for k in children(s):
        var_occurrences(k, acc)
    return acc


def binders(s):
    return [t.var for _, t in positions(s) if isinstance(t, Lam)]


def free_vars(s, bound=frozenset()):
    if isinstance(s, Var):
        return set() if s.name in bound else {s.name}
    if isinstance(s, Lam):
        return free_vars(s.body, bound | {s.var})
    out = set()
    for k in children(s):
        out |= free_vars(k, bound)
    return out


def well_formed(s) -> bool:
    """Linearity: each binder binds exactly one occurrence, no free or shadowed variables."""
    names = binders(s)
    if len(names) != len(set(names)):
        return False
    occ = var_occurrences(s)
    if any(n != 1 for n in occ.values()):
        return False
    if free_vars(s):
        return False
    return _linear(s)


def _linear(s):
    if isinstance(s, Lam):
        if var_occurrences(s.body).get(s.var, 0) != 1:
            return False
    return all(_linear(k) for k in children(s))


def substitute(s, name, repl):
    """Replace the occurrence of Var(name) in s by repl (no capture checks)."""
    if isinstance(s, Var):
        return repl if s.name == name else s
    kids = children(s)
    if not kids:
        return s
    return rebuild(s, [substitute(k, name, repl) for k in kids])


def strip_origins(s):
    if isinstance(s, FLeaf):
        return FLeaf(s.formula) if s.origin is not None else s
    kids = children(s)
    return rebuild(s, [strip_origins(k) for k in kids]) if kids else s


def canonical(s, keep_origins=True):
    """Rename bound variables to _0, _1, ... in pre-order."""
    counter = itertools.count()
    return _canon(s, {}, counter, keep_origins)


def _canon(s, env, counter, keep):
    if isinstance(s, Var):
        return Var(env.get(s.name, s.name))
    if isinstance(s, Lam):
        fresh = f"_{next(counter)}"
        inner = dict(env)
        inner[s.var] = fresh
        return Lam(fresh, _canon(s.body, inner, counter, keep))
    if isinstance(s, FLeaf):
        return s if keep or s.origin is None else FLeaf(s.formula)
    kids = children(s)
    if not kids:
        return s
    return rebuild(s, [_canon(k, env, counter, keep) for k in kids])


def alpha_equal(a, b, ignore_origins=False) -> bool:
    return canonical(a, not ignore_origins) == canonical(b, not ignore_origins)


def is_lambek_tree(s) -> bool:
    if isinstance(s, FLeaf):
        return True
    if isinstance(s, Comp):
        return is_lambek_tree(s.left) and is_lambek_tree(s.right)
    return False


def is_end_sequent(seq: Sequent) -> bool:
    """Lambek trees, plus the bare unit for 1 => 1."""
    if seq.antecedent == ONE:
        return isinstance(seq.succedent, Unit)
    return is_lambek_tree(seq.antecedent)


def yield_(s):
    if not is_lambek_tree(s):
        raise NotLambekTree(print_structure(s))
    return [leaf.origin for leaf in leaves(s)]


class FreshNames:
    """Monotone supply of variable names that never repeats."""

    def __init__(self, prefix="x", avoid=()):
        self.prefix = prefix
        self.n = 0
        self.avoid = set(avoid)

    def __call__(self):
        while True:
            self.n += 1
            name = f"{self.prefix}{self.n}"
            if name not in self.avoid:
                return name


# -- concrete syntax ---------------------------------------------------------

def print_structure(s, words=True) -> str:
    if isinstance(s, FLeaf):
        f = print_formula(s.formula)
        if not words:
            return f
        return f"{s.origin if s.origin is not None else '_'}:{f}"
    if isinstance(s, One):
        return "1"
    if isinstance(s, Var):
        return s.name
    if isinstance(s, Comp):
        return f"({print_structure(s.left, words)} o {print_structure(s.right, words)})"
    if isinstance(s, CComp):
        return f"({print_structure(s.left, words)} @ {print_structure(s.right, words)})"
    if isinstance(s, Lam):
        return f"\\{s.var}.{print_structure(s.body, words)}"
    raise TypeError(s)


_WORD = re.compile(r"[^\s():@\\.]+")
_VAR = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


class StructureSyntaxError(ValueError):
    pass


class _SReader:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def error(self, msg):
        raise StructureSyntaxError(f"{msg} at position {self.pos}")

    def expect(self, ch):
        self.ws()
        if not self.text.startswith(ch, self.pos):
            self.error(f"expected {ch!r}")
        self.pos += len(ch)

    def structure(self):
        self.ws()
        t = self.text
        if self.pos >= len(t):
            self.error("unexpected end of structure")
        ch = t[self.pos]
        if ch == "(":
            self.pos += 1
            left = self.structure()
            self.ws()
            if t.startswith("o", self.pos):
                ctor = Comp
            elif t.startswith("@", self.pos):
                ctor = CComp
            else:
                self.error("expected 'o' or '@'")
            self.pos += 1
            right = self.structure()
            self.expect(")")
            return ctor(left, right)
        if ch == "\\":
            self.pos += 1
            m = _VAR.match(t, self.pos)
            if not m:
                self.error("expected variable")
            self.pos = m.end()
            self.expect(".")
            return Lam(m.group(), self.structure())
        m = _WORD.match(t, self.pos)
        if not m:
            self.error("expected a structure")
        word = m.group()
        self.pos = m.end()
        if word == "1" and not self._colon_follows(self.pos):
            return ONE
        if self._colon_follows(self.pos):
            self.expect(":")
            f = self.formula()
            return FLeaf(f, None if word == "_" else word)
        if not _VAR.fullmatch(word):
            self.error(f"bad variable {word!r}")
        return Var(word)

    def _colon_follows(self, pos):
        while pos < len(self.text) and self.text[pos].isspace():
            pos += 1
        return self.text.startswith(":", pos)

    def formula(self):
        """Read one formula, stopping where a structure operator or ')' follows."""
        from .formula import _Reader
        toks = []
        depth = 0
        want_operand = True
        pos = self.pos
        while True:
            while pos < len(self.text) and self.text[pos].isspace():
                pos += 1
            m = _TOKEN.match(self.text, pos)
            if m is None or pos >= len(self.text):
                break
            kind = m.lastgroup
            if want_operand:
                if kind in ("atom", "unit"):
                    want_operand = False
                elif kind == "lp":
                    depth += 1
                else:
                    break
            else:
                if kind == "rp" and depth > 0:
                    depth -= 1
                elif kind == "op":
                    want_operand = True
                else:
                    break
            toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        if not toks:
            self.error("expected formula")
        reader = _Reader(self.text, toks)
        try:
            f = reader.formula()
        except FormulaSyntaxError as e:
            raise StructureSyntaxError(str(e)) from None
        if reader.i != len(toks):
            raise StructureSyntaxError(f"bad formula at position {self.pos}")
        self.pos = pos
        return f


def parse_structure(text: str) -> Structure:
    r"""Parse ``word:formula | 1 | (s o s) | (s @ s) | \x.s | x``.

    >>> print_structure(parse_structure("(John:np o left:np\\s)"))
    '(John:np o left:np\\s)'
    """
    r = _SReader(text)
    s = r.structure()
    r.ws()
    if r.pos != len(text):
        r.error("trailing input")
    return s


def parse_sequent(text: str) -> Sequent:
    if "=>" not in text:
        raise StructureSyntaxError("sequent needs '=>'")
    left, right = text.rsplit("=>", 1)
    from .formula import parse_formula
    return Sequent(parse_structure(left), parse_formula(right))


def comp_tree(leaves_, shape):
    """Build a Comp tree over leaves_ following a nested-pair shape of indices."""
    if isinstance(shape, int):
        return leaves_[shape]
    return Comp(comp_tree(leaves_, shape[0]), comp_tree(leaves_, shape[1]))


def bracketings(n, offset=0):
    """All binary bracketings of n items as nested index pairs."""
    if n == 1:
        return [offset]
    out = []
    for k in range(1, n):
        for l in bracketings(k, offset):
            for r in bracketings(n - k, offset + k):
                out.append((l, r))
    return out
