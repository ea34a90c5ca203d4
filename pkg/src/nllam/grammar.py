"""Lexicons, the parse driver and the permutation-closure constructions."""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace as dc_replace
from typing import Optional

from .aps import APS, classify, to_aps, to_structure
from .formula import CLDiv, CProd, Formula, RDiv, UNIT, Atom, connective_count, parse_formula, print_formula
from .proofnet import ArityMismatch, ExtendedLinking, apply_linking, partial_linkings, unfold_sequent
from .rewrite import EngineOptions, RewriteTrace, normalize_eager, search_trace, sequentialize
from .sequent_calculus import SequentProof
from .structure import FLeaf, Sequent, Structure, children, is_lambek_tree, rebuild

DEFAULT_MAX_LINKINGS = 10 ** 6


class UnknownWord(KeyError):
    pass


class LimitExceeded(RuntimeError):
    pass


class LexiconSyntaxError(ValueError):
    pass


@dataclass
class Lexicon:
    entries: dict = field(default_factory=dict)   # word -> list of Formula, no duplicates
    goals: list = field(default_factory=list)
    options: EngineOptions = EngineOptions()

    def add(self, word, f):
        fs = self.entries.setdefault(word, [])
        if f not in fs:
            fs.append(f)

    def lookup(self, word):
        if word not in self.entries:
            raise UnknownWord(word)
        return self.entries[word]

    def copy(self):
        return Lexicon({w: list(fs) for w, fs in self.entries.items()}, list(self.goals), self.options)

    def dumps(self):
        lines = [f":goal {print_formula(g)}" for g in self.goals]
        default = EngineOptions()
        for name in ("allow_empty_antecedent", "unit_insertion", "eta"):
            if getattr(self.options, name) != getattr(default, name):
                lines.append(f":option {name} {str(getattr(self.options, name)).lower()}")
        for w, fs in self.entries.items():
            for f in fs:
                lines.append(f"{w} : {print_formula(f)}")
        return "\n".join(lines) + "\n"


_OPTION_NAMES = {"allow_empty_antecedent": "allow_empty_antecedent", "empty_antecedent": "allow_empty_antecedent",
                 "unit_insertion": "unit_insertion", "eta": "eta", "max_steps": "max_steps"}
_TRUE = {"true", "on", "yes", "allow", "1"}
_FALSE = {"false", "off", "no", "forbid", "0"}


def parse_lexicon(text: str) -> Lexicon:
    """Lines "word : formula", "# comment", ":goal formula", ":option name value"."""
    lex = Lexicon()
    opts = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith(":goal"):
                lex.goals.append(parse_formula(line[5:].strip()))
            elif line.startswith(":option"):
                parts = line.split()
                if len(parts) != 3 or parts[1] not in _OPTION_NAMES:
                    raise LexiconSyntaxError(f"line {n}: bad option {line!r}")
                name, val = _OPTION_NAMES[parts[1]], parts[2].lower()
                if name == "max_steps":
                    opts[name] = int(val)
                elif val in _TRUE or val in _FALSE:
                    opts[name] = val in _TRUE
                else:
                    raise LexiconSyntaxError(f"line {n}: bad option value {val!r}")
            else:
                word, sep, f = line.partition(":")
                word = word.strip()
                if not sep or not word or " " in word:
                    raise LexiconSyntaxError(f"line {n}: expected 'word : formula'")
                lex.add(word, parse_formula(f.strip()))
        except LexiconSyntaxError:
            raise
        except ValueError as e:
            raise LexiconSyntaxError(f"line {n}: {e}") from e
    if not lex.goals:
        raise LexiconSyntaxError("lexicon declares no :goal")
    lex.options = EngineOptions(**opts)
    return lex


def load_lexicon(path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh.read())


@dataclass
class ParseResult:
    word_sequence: list
    formulas: list
    goal: Formula
    linking: ExtendedLinking
    trace: RewriteTrace
    antecedent: Structure
    sequent_proof: SequentProof


@dataclass
class Limits:
    max_linkings: Optional[int] = None
    max_solutions: Optional[int] = None

    def linking_budget(self):
        if self.max_linkings is not None:
            return self.max_linkings
        env = os.environ.get("NLLAM_MAX_LINKINGS")
        return int(env) if env else DEFAULT_MAX_LINKINGS


def leaf_vertices(g: APS):
    """Hypothesis vertices of a tensor tree, left to right."""
    _, paths = to_structure(g, with_paths=True)
    hyps = [v for v in paths if g.above(v) is None and v in g.h]
    return sorted(hyps, key=lambda v: paths[v])


def _matches(g: APS, n_words):
    if classify(g) != "TensorTree":
        return False
    s = to_structure(g)
    if not is_lambek_tree(s):
        return False
    return leaf_vertices(g) == g.word_order and len(g.word_order) == n_words


def parse(lex: Lexicon, sentence, limits: Limits = Limits(), options: Optional[EngineOptions] = None, seed=None):
    """Every (lexical choice, goal, linking) whose normal form is a Lambek
    tree with the sentence's words in order."""
    words = sentence.split() if isinstance(sentence, str) else list(sentence)
    opts = options or lex.options
    choices = [lex.lookup(w) for w in words]
    budget = limits.linking_budget()
    seen = 0
    results = []
    # simplest assignments first, so membership checks stop early
    combos = sorted(itertools.product(*choices), key=lambda fs: sum(connective_count(f) for f in fs))
    for formulas in combos:
        for goal in lex.goals:
            ps = unfold_sequent(list(zip(words, formulas)), goal)
            try:
                linkings = partial_linkings(ps, opts.unit_insertion)
                for e in linkings:
                    seen += 1
                    if seen > budget:
                        raise LimitExceeded(f"more than {budget} linkings")
                    trace = _derive(ps, e, opts, len(words), seed)
                    if trace is None:
                        continue
                    results.append(ParseResult(words, list(formulas), goal, e, trace,
                                               to_structure(trace.end), sequentialize(trace)))
                    if limits.max_solutions is not None and len(results) >= limits.max_solutions:
                        return results
            except ArityMismatch:
                continue
    return results


def _derive(ps, e, opts, n_words, seed=None):
    g = to_aps(apply_linking(ps, e))
    if opts.unit_insertion:
        return search_trace(g, opts, lambda h: _matches(h, n_words))
    t = normalize_eager(g, opts, seed=seed)
    return t if _matches(t.end, n_words) else None


def derivable(lex: Lexicon, sentence, limits: Limits = Limits(), options: Optional[EngineOptions] = None) -> bool:
    return bool(parse(lex, sentence, dc_replace(limits, max_solutions=1), options))


def permutation_closure(lex: Lexicon) -> Lexicon:
    """Add w : s/(1**(A\\\\s)) for every entry w : A (single goal s)."""
    if len(lex.goals) != 1:
        raise ValueError("permutation closure needs a single goal")
    s = lex.goals[0]
    out = lex.copy()
    for w, fs in lex.entries.items():
        for a in fs:
            out.add(w, RDiv(s, CProd(UNIT, CLDiv(a, s))))
    return out


def mix_lexicon(k: int) -> Lexicon:
    """Base lexicon for (a1 ... ak)+ over atoms t2 ... tk."""
    if k < 2:
        raise ValueError("k must be at least 2")
    s = Atom("s")
    f = s
    for i in range(k, 1, -1):
        f = RDiv(f, Atom(f"t{i}"))
    lex = Lexicon(goals=[s])
    lex.add("a1", f)
    lex.add("a1", RDiv(f, s))
    for i in range(2, k + 1):
        lex.add(f"a{i}", Atom(f"t{i}"))
    return lex


def parse_hypotheses(text: str):
    """"A, B, C" or "w1:A, w2:B" into (word, Formula) pairs."""
    out = []
    for i, item in enumerate(x.strip() for x in text.split(",")):
        if not item:
            raise LexiconSyntaxError("empty hypothesis")
        word, sep, f = item.partition(":")
        if sep and word.strip() and " " not in word.strip() and "(" not in word:
            out.append((word.strip(), parse_formula(f.strip())))
        else:
            out.append((f"w{i + 1}", parse_formula(item)))
    return out


def prove_sequent(hypotheses, goal, options: EngineOptions = EngineOptions(), limits: Limits = Limits()):
    """Proof nets for hypotheses ⊢ goal, any bracketing, leaves in the given order."""
    lex = Lexicon(goals=[goal], options=options)
    words = []
    for i, (w, f) in enumerate(hypotheses):
        tag = f"{w}#{i}" if any(w == x for x, _ in hypotheses[:i]) else w
        lex.entries[tag] = [f]
        words.append(tag)
    return parse(lex, words, limits, options)


def _relabel(s, words):
    if isinstance(s, FLeaf):
        return FLeaf(s.formula, words.get(s.origin, s.origin))
    return rebuild(s, [_relabel(k, words) for k in children(s)])


def _relabel_proof(p: SequentProof, words) -> SequentProof:
    """Put the caller's words back in place of internal leaf tags."""
    seq = Sequent(_relabel(p.conclusion.antecedent, words), p.conclusion.succedent)
    return SequentProof(p.rule, seq, [_relabel_proof(q, words) for q in p.premisses], p.focus)


@dataclass
class StructureVerdict:
    provable: bool
    method: str                 # "nets" or "oracle"
    result: Optional[ParseResult] = None
    proof: Optional[SequentProof] = None


def prove_structure(seq, options: EngineOptions = EngineOptions(), limits: Limits = Limits(),
                    oracle_budget=None) -> StructureVerdict:
    """Decide Γ ⊢ C for this exact Γ.

    Nets decide it when the β-normal form of Γ is a Lambek tree: the net's
    normal form must be that tree. Otherwise the sequent search decides.
    """
    from .sequent_calculus import Budget, CalculusOptions, beta_normalize, oracle_search
    from .structure import alpha_equal, leaves, rebuild, children
    target = beta_normalize(seq.antecedent)
    if is_lambek_tree(target):
        lv = leaves(target)
        tags = [f"@{i}" for i in range(len(lv))]
        it = iter(tags)

        def tag(s):
            if isinstance(s, FLeaf):
                return FLeaf(s.formula, next(it))
            return rebuild(s, [tag(k) for k in children(s)])

        tagged = tag(target)
        hyps = [(t, l.formula) for t, l in zip(tags, lv)]
        words = {t: l.origin for t, l in zip(tags, lv)}
        for r in prove_sequent(hyps, seq.succedent, options, limits):
            if alpha_equal(r.antecedent, tagged):
                return StructureVerdict(True, "nets", r, _relabel_proof(r.sequent_proof, words))
        return StructureVerdict(False, "nets")
    budget = oracle_budget or Budget()
    p = oracle_search(seq, budget, CalculusOptions(options.allow_empty_antecedent))
    return StructureVerdict(p is not None, "oracle", None, p)
