"""Formulas of NL-lambda: atoms, the unit and two families of binary connectives."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class Polarity(enum.Enum):
    HYPOTHESIS = "hypothesis"
    CONCLUSION = "conclusion"

    def flip(self) -> "Polarity":
        if self is Polarity.HYPOTHESIS:
            return Polarity.CONCLUSION
        return Polarity.HYPOTHESIS


class Formula:
    __slots__ = ()

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self):
        return f"Atom({self.name})"


@dataclass(frozen=True, repr=False)
class Unit(Formula):
    def __repr__(self):
        return "Unit"


UNIT = Unit()


@dataclass(frozen=True, repr=False)
class Binary(Formula):
    left: Formula
    right: Formula

    symbol = "?"
    continuation = False

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class LDiv(Binary):
    """A\\C: the argument A is on the left."""
    symbol = "\\"


class RDiv(Binary):
    """C/B: the argument B is on the right."""
    symbol = "/"


class Prod(Binary):
    symbol = "*"


class CLDiv(Binary):
    symbol = "\\\\"
    continuation = True


class CRDiv(Binary):
    symbol = "//"
    continuation = True


class CProd(Binary):
    symbol = "**"
    continuation = True


BY_SYMBOL = {cls.symbol: cls for cls in (LDiv, RDiv, Prod, CLDiv, CRDiv, CProd)}


class FormulaSyntaxError(ValueError):
    def __init__(self, message, text="", pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


_TOKEN = re.compile(r"\s*(?:(?P<atom>[a-z][a-z0-9_]*)|(?P<unit>1)|(?P<op>\\\\|//|\*\*|\\|/|\*)|(?P<lp>\()|(?P<rp>\)))")


def tokenize(text: str, start: int = 0):
    """Yield (kind, value, position) triples; raise on anything unknown."""
    pos = start
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", text, pos)
        kind = m.lastgroup
        yield kind, m.group(kind), m.start(kind)
        pos = m.end()


class _Reader:
    def __init__(self, text, tokens=None):
        self.text = text
        self.tokens = list(tokenize(text)) if tokens is None else tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def formula(self):
        left = self.operand()
        kind, value, pos = self.peek()
        if kind != "op":
            return left
        self.take()
        right = self.operand()
        kind2, _, pos2 = self.peek()
        if kind2 == "op":
            raise FormulaSyntaxError("connectives do not associate; add parentheses", self.text, pos2)
        return BY_SYMBOL[value](left, right)

    def operand(self):
        kind, value, pos = self.take()
        if kind == "atom":
            return Atom(value)
        if kind == "unit":
            return UNIT
        if kind == "lp":
            f = self.formula()
            kind, _, pos2 = self.take()
            if kind != "rp":
                raise FormulaSyntaxError("unbalanced parentheses", self.text, pos2)
            return f
        if kind is None:
            raise FormulaSyntaxError("unexpected end of formula", self.text, pos)
        raise FormulaSyntaxError(f"unexpected {value!r}", self.text, pos)


def parse_formula(text: str) -> Formula:
    """Parse the ASCII formula syntax.

    >>> print_formula(parse_formula("(np\\\\s)/np"))
    '(np\\\\s)/np'
    """
    reader = _Reader(text)
    f = reader.formula()
    kind, value, pos = reader.peek()
    if kind is not None:
        if kind == "rp":
            raise FormulaSyntaxError("unbalanced parentheses", text, pos)
        raise FormulaSyntaxError(f"trailing input {value!r}", text, pos)
    return f


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Unit):
        return "1"
    return _operand(f.left) + f.symbol + _operand(f.right)


def _operand(f):
    s = print_formula(f)
    return f"({s})" if isinstance(f, Binary) else s


def connective_count(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Unit):
        return 1
    return 1 + connective_count(f.left) + connective_count(f.right)


def atoms(f: Formula):
    """Atom names of f, left to right, with repetition."""
    if isinstance(f, Atom):
        return [f.name]
    if isinstance(f, Binary):
        return atoms(f.left) + atoms(f.right)
    return []


def atom_balance(f: Formula, polarity: Polarity, acc=None) -> dict:
    """Signed atom counts: +1 per hypothesis occurrence, -1 per conclusion occurrence."""
    acc = {} if acc is None else acc
    if isinstance(f, Atom):
        acc[f.name] = acc.get(f.name, 0) + (1 if polarity is Polarity.HYPOTHESIS else -1)
    elif isinstance(f, (LDiv, CLDiv)):
        atom_balance(f.left, polarity.flip(), acc)
        atom_balance(f.right, polarity, acc)
    elif isinstance(f, (RDiv, CRDiv)):
        atom_balance(f.left, polarity, acc)
        atom_balance(f.right, polarity.flip(), acc)
    elif isinstance(f, (Prod, CProd)):
        atom_balance(f.left, polarity, acc)
        atom_balance(f.right, polarity, acc)
    return acc
