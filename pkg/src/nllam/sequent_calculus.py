"""Sequent proofs: a rule-by-rule checker and a bounded backward-chaining oracle."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

from .formula import (Atom, Binary, CLDiv, CProd, CRDiv, LDiv, Polarity, Prod, RDiv, Unit, UNIT,
                      atom_balance, parse_formula)
from .structure import (CComp, Comp, FLeaf, Lam, ONE, One, Sequent, Var, bracketings, canonical,
                        comp_tree, free_vars, parse_structure, positions, replace, size as structure_size,
                        substitute, subterm, var_occurrences, well_formed, binders)

RULES = ("Ax", "Cut", "tL", "tR", "/L", "/R", "\\L", "\\R", "•L", "•R", "⤉L", "⤉R", "⤈L", "⤈R",
         "⊙L", "⊙R", "∘1", "∘1⁻¹", "1∘", "1∘⁻¹", "β", "β⁻¹", "η")

# connective class -> (left rule, right rule, structural constructor)
CONNECTIVE_RULES = {
    RDiv: ("/L", "/R", Comp), LDiv: ("\\L", "\\R", Comp), Prod: ("•L", "•R", Comp),
    CRDiv: ("⤉L", "⤉R", CComp), CLDiv: ("⤈L", "⤈R", CComp), CProd: ("⊙L", "⊙R", CComp),
}
RULE_CONNECTIVE = {}
for _cls, (_l, _r, _) in CONNECTIVE_RULES.items():
    RULE_CONNECTIVE[_l] = _cls
    RULE_CONNECTIVE[_r] = _cls


@dataclass(frozen=True)
class CalculusOptions:
    allow_empty_antecedent: bool = False


@dataclass
class SequentProof:
    rule: str
    conclusion: Sequent
    premisses: list = field(default_factory=list)
    focus: tuple = ()

    def size(self):
        return 1 + sum(p.size() for p in self.premisses)

    def rules_used(self):
        out = [self.rule]
        for p in self.premisses:
            out.extend(p.rules_used())
        return out

    def to_dict(self):
        return {"rule": self.rule, "sequent": str(self.conclusion), "focus": list(self.focus),
                "premisses": [p.to_dict() for p in self.premisses]}

    @classmethod
    def from_dict(cls, d):
        ant, goal = d["sequent"].rsplit("=>", 1)
        seq = Sequent(parse_structure(ant), parse_formula(goal))
        return cls(d["rule"], seq, [cls.from_dict(p) for p in d["premisses"]], tuple(d["focus"]))

    def render(self, indent=0):
        lines = [" " * indent + f"{self.rule}: {self.conclusion}"]
        for p in self.premisses:
            lines.append(p.render(indent + 2))
        return "\n".join(lines)


class ProofError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


# -- checking ---------------------------------------------------------------

def _same(a, b):
    return canonical(a, keep_origins=False) == canonical(b, keep_origins=False)


def _leaf(s, f=None):
    return isinstance(s, FLeaf) and (f is None or s.formula == f)


def explain_proof(p: SequentProof):
    """Return None if p is a correct proof, else (rule, conclusion, reason) of the first bad node."""
    reason = _check_node(p)
    if reason is not None:
        return (p.rule, str(p.conclusion), reason)
    for q in p.premisses:
        bad = explain_proof(q)
        if bad is not None:
            return bad
    return None


def check_proof(p: SequentProof) -> bool:
    return explain_proof(p) is None


def _check_node(p):
    rule = p.rule
    if rule not in RULES:
        return f"unknown rule {rule}"
    concl = p.conclusion
    ant, goal = concl.antecedent, concl.succedent
    if not well_formed(ant):
        return "antecedent violates variable linearity"
    prem = p.premisses
    arity = {"Ax": 0, "tR": 0, "Cut": 2, "•R": 2, "⊙R": 2, "/L": 2, "\\L": 2, "⤉L": 2, "⤈L": 2}.get(rule, 1)
    if len(prem) != arity:
        return f"expected {arity} premisses"
    ps = [q.conclusion for q in prem]
    focus = tuple(p.focus)

    if rule == "Ax":
        return None if _leaf(ant, goal) else "axiom needs A => A"
    if rule == "tR":
        return None if isinstance(ant, One) and isinstance(goal, Unit) else "tR needs 1 => 1"
    if rule == "Cut":
        d, g = ps
        try:
            hole = subterm(g.antecedent, focus)
            here = subterm(ant, focus)
        except (IndexError, AttributeError):
            return "bad focus"
        if not _leaf(hole, d.succedent):
            return "cut formula not at focus"
        if g.succedent != goal or not _same(here, d.antecedent):
            return "cut premisses do not match"
        return None if _same(replace(g.antecedent, focus, d.antecedent), ant) else "context mismatch"

    if rule in ("/R", "\\R", "⤉R", "⤈R"):
        cls = RULE_CONNECTIVE[rule]
        if type(goal) is not cls:
            return "succedent has wrong main connective"
        ctor = CONNECTIVE_RULES[cls][2]
        (q,) = ps
        if rule in ("/R", "⤉R"):
            want = ctor(ant, FLeaf(goal.right))
            target = goal.left
        else:
            want = ctor(FLeaf(goal.left), ant)
            target = goal.right
        return None if q.succedent == target and _same(q.antecedent, want) else "premiss mismatch"
    if rule in ("•R", "⊙R"):
        cls = RULE_CONNECTIVE[rule]
        ctor = CONNECTIVE_RULES[cls][2]
        if type(goal) is not cls or not isinstance(ant, ctor):
            return "shape mismatch"
        a, b = ps
        ok = (a.succedent == goal.left and b.succedent == goal.right
              and _same(a.antecedent, ant.left) and _same(b.antecedent, ant.right))
        return None if ok else "premiss mismatch"

    try:
        here = subterm(ant, focus)
    except (IndexError, AttributeError):
        return "bad focus"

    if rule in ("/L", "⤉L", "\\L", "⤈L"):
        cls = RULE_CONNECTIVE[rule]
        ctor = CONNECTIVE_RULES[cls][2]
        if not isinstance(here, ctor):
            return "focus is not the right structural connective"
        if rule in ("/L", "⤉L"):
            fl, delta = here.left, here.right
            if not (_leaf(fl) and type(fl.formula) is cls):
                return "no implication at focus"
            arg, res = fl.formula.right, fl.formula.left
        else:
            delta, fl = here.left, here.right
            if not (_leaf(fl) and type(fl.formula) is cls):
                return "no implication at focus"
            arg, res = fl.formula.left, fl.formula.right
        d, g = ps
        if d.succedent != arg or not _same(d.antecedent, delta):
            return "argument premiss mismatch"
        if g.succedent != goal or not _same(g.antecedent, replace(ant, focus, FLeaf(res))):
            return "context premiss mismatch"
        return None
    if rule in ("•L", "⊙L", "tL"):
        if not _leaf(here):
            return "no formula at focus"
        f = here.formula
        if rule == "tL":
            if not isinstance(f, Unit):
                return "tL needs the unit at focus"
            new = ONE
        else:
            cls = RULE_CONNECTIVE[rule]
            if type(f) is not cls:
                return "wrong connective at focus"
            new = CONNECTIVE_RULES[cls][2](FLeaf(f.left), FLeaf(f.right))
        (q,) = ps
        ok = q.succedent == goal and _same(q.antecedent, replace(ant, focus, new))
        return None if ok else "premiss mismatch"

    (q,) = ps
    if q.succedent != goal:
        return "succedent changed by structural rule"
    qa = q.antecedent
    if not well_formed(qa):
        return "premiss violates variable linearity"
    if rule in ("∘1", "1∘"):
        try:
            there = subterm(qa, focus)
        except (IndexError, AttributeError):
            return "bad focus"
        return _unit_shape(rule, there, lambda x: _same(replace(qa, focus, x), ant))
    if rule in ("∘1⁻¹", "1∘⁻¹"):
        return _unit_shape(rule[:2], here, lambda x: _same(replace(ant, focus, x), qa))
    if rule == "β":
        try:
            there = subterm(qa, focus)
        except (IndexError, AttributeError):
            return "bad focus"
        reduct = _beta(there)
        if isinstance(reduct, str):
            return reduct
        return None if _same(replace(qa, focus, reduct), ant) else "β result mismatch"
    if rule == "β⁻¹":
        reduct = _beta(here)
        if isinstance(reduct, str):
            return reduct
        return None if _same(replace(ant, focus, reduct), qa) else "β⁻¹ result mismatch"
    if rule == "η":
        try:
            there = subterm(qa, focus)
        except (IndexError, AttributeError):
            return "bad focus"
        if not (isinstance(there, Lam) and isinstance(there.body, CComp)
                and there.body.left == Var(there.var)):
            return "η needs \\x.(x @ G)"
        if there.var in var_occurrences(there.body.right):
            return "η variable occurs twice"
        return None if _same(replace(qa, focus, there.body.right), ant) else "η result mismatch"
    return "unhandled rule"


def _unit_shape(rule, node, check):
    if not isinstance(node, Comp):
        return "no ∘ at focus"
    if rule == "∘1":
        if node.right != ONE:
            return "right daughter is not 1"
        keep = node.left
    else:
        if node.left != ONE:
            return "left daughter is not 1"
        keep = node.right
    return None if check(keep) else "context mismatch"


def _beta(node):
    """Contract Δ @ \\x.Γ[x] to Γ[Δ], or return a reason string."""
    if not (isinstance(node, CComp) and isinstance(node.right, Lam)):
        return "no Δ @ \\x.Γ at focus"
    delta, lam = node.left, node.right
    if var_occurrences(lam.body).get(lam.var, 0) != 1:
        return "bound variable must occur exactly once"
    if lam.var in var_occurrences(delta) or lam.var in binders(delta):
        return "bound variable is not fresh"
    return substitute(lam.body, lam.var, delta)


# -- backward search --------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    max_depth: int = 24
    max_structure_size: int = 13
    max_nodes: int = 2_000_000


def _balance(ant, goal, with_units):
    """Signed atom counts of a sequent; with_units also counts 1 and t occurrences."""
    acc = {}
    for _, t in positions(ant):
        if isinstance(t, FLeaf):
            atom_balance(t.formula, Polarity.HYPOTHESIS, acc)
            if with_units:
                _unit_balance(t.formula, Polarity.HYPOTHESIS, acc)
        elif isinstance(t, One) and with_units:
            acc["1"] = acc.get("1", 0) + 1
    atom_balance(goal, Polarity.CONCLUSION, acc)
    if with_units:
        _unit_balance(goal, Polarity.CONCLUSION, acc)
    return acc


def _unit_balance(f, pol, acc):
    if isinstance(f, Unit):
        acc["1"] = acc.get("1", 0) + (1 if pol is Polarity.HYPOTHESIS else -1)
    elif isinstance(f, (LDiv, CLDiv)):
        _unit_balance(f.left, pol.flip(), acc)
        _unit_balance(f.right, pol, acc)
    elif isinstance(f, (RDiv, CRDiv)):
        _unit_balance(f.left, pol, acc)
        _unit_balance(f.right, pol.flip(), acc)
    elif isinstance(f, (Prod, CProd)):
        _unit_balance(f.left, pol, acc)
        _unit_balance(f.right, pol, acc)


def _has_unit(f):
    if isinstance(f, Unit):
        return True
    if isinstance(f, Binary):
        return _has_unit(f.left) or _has_unit(f.right)
    return False


class OracleProver:
    """Depth-bounded backward search without Cut.

    Rules are tried logical before structural and right before left.
    Search runs on alpha-canonical antecedents without word labels, so a
    memoized proof can be reused verbatim; a failure at remaining depth d
    also settles every query with remaining depth <= d.

    Pruning relies on invariants of the calculus, not on proof nets:
    provable sequents have balanced atom counts; without empty antecedents
    each 1 and each negative t needs its own positive t. β⁻¹ is applied
    eagerly since β can rebuild the redex, and β is only used fused with the
    ⤉L or ⊙R step that consumes the ⊚ it creates. Other uses of β are
    detours that a later β⁻¹ undoes.
    """

    def __init__(self, budget: Budget = Budget(), options: CalculusOptions = CalculusOptions()):
        self.budget = budget
        self.options = options
        self.proved = {}
        self.failed = {}
        self.nodes = 0

    def prove(self, seq: Sequent) -> Optional[SequentProof]:
        self.count_units = not self.options.allow_empty_antecedent
        self.units = self.options.allow_empty_antecedent or _has_unit(seq.succedent) or any(
            isinstance(t, FLeaf) and _has_unit(t.formula) for _, t in positions(seq.antecedent))
        ant = canonical(seq.antecedent, keep_origins=False)
        proof = self._prove(ant, seq.succedent, self.budget.max_depth)
        if proof is None:
            return None
        return SequentProof(proof.rule, seq, proof.premisses, proof.focus)

    def _prove(self, ant, goal, depth):
        key = (ant, goal)
        hit = self.proved.get(key)
        if hit is not None:
            return hit
        if depth <= 0 or self.failed.get(key, -1) >= depth:
            return None
        bal = _balance(ant, goal, self.count_units)
        if bal.pop("1", 0) > 0 or any(bal.values()):
            self.failed[key] = 1 << 30
            return None
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded(f"more than {self.budget.max_nodes} search nodes")
        for rule, focus, premisses in self._candidates(ant, goal):
            subs = []
            for pa, pg in premisses:
                if rule == "β":
                    sp = self._macro(pa, pg, depth - 1)
                else:
                    sp = self._prove(canonical(pa, keep_origins=False), pg, depth - 1)
                if sp is None:
                    break
                subs.append(sp)
            else:
                proof = SequentProof(rule, Sequent(ant, goal), subs, focus)
                self.proved[key] = proof
                return proof
        self.failed[key] = max(depth, self.failed.get(key, -1))
        return None

    def _macro(self, expanded, goal, depth):
        """Prove the β-expanded sequent by the ⤉L or ⊙R step that consumes its new ⊚."""
        rule, focus, premisses = expanded
        subs = []
        for pa, pg in premisses:
            sp = self._prove(canonical(pa, keep_origins=False), pg, depth - 1)
            if sp is None:
                return None
            subs.append(sp)
        return SequentProof(rule, Sequent(focus[1], goal), subs, focus[0])

    def _candidates(self, ant, goal):
        if isinstance(ant, FLeaf) and ant.formula == goal:
            yield "Ax", (), []
            return
        pos = list(positions(ant))
        # β⁻¹ only shrinks and β can rebuild its redex, so it is applied eagerly
        for path, node in pos:
            if isinstance(node, CComp) and isinstance(node.right, Lam):
                red = _beta(node)
                if not isinstance(red, str):
                    yield "β⁻¹", path, [(replace(ant, path, red), goal)]
                    return
        if ant == ONE and isinstance(goal, Unit):
            yield "tR", (), []
        cls = type(goal)
        if cls in CONNECTIVE_RULES:
            _, right, ctor = CONNECTIVE_RULES[cls]
            if right in ("/R", "⤉R"):
                yield right, (), [(ctor(ant, FLeaf(goal.right)), goal.left)]
            elif right in ("\\R", "⤈R"):
                yield right, (), [(ctor(FLeaf(goal.left), ant), goal.right)]
            elif isinstance(ant, ctor):
                yield right, (), [(ant.left, goal.left), (ant.right, goal.right)]
        for path, node in pos:
            if isinstance(node, (Comp, CComp)):
                l, r = node.left, node.right
                if isinstance(l, FLeaf) and type(l.formula) in (RDiv, CRDiv) and \
                        CONNECTIVE_RULES[type(l.formula)][2] is type(node) and not free_vars(r):
                    f = l.formula
                    yield CONNECTIVE_RULES[type(f)][0], path, [(r, f.right), (replace(ant, path, FLeaf(f.left)), goal)]
                if isinstance(r, FLeaf) and type(r.formula) in (LDiv, CLDiv) and \
                        CONNECTIVE_RULES[type(r.formula)][2] is type(node) and not free_vars(l):
                    f = r.formula
                    yield CONNECTIVE_RULES[type(f)][0], path, [(l, f.left), (replace(ant, path, FLeaf(f.right)), goal)]
            elif isinstance(node, FLeaf):
                f = node.formula
                if type(f) in (Prod, CProd):
                    new = CONNECTIVE_RULES[type(f)][2](FLeaf(f.left), FLeaf(f.right))
                    yield CONNECTIVE_RULES[type(f)][0], path, [(replace(ant, path, new), goal)]
                elif isinstance(f, Unit):
                    yield "tL", path, [(replace(ant, path, ONE), goal)]
        # β fused with the rule consuming the ⊚ it builds
        used = set(binders(ant))
        name = next(f"x{i}" for i in itertools.count(1) if f"x{i}" not in used)
        for path, node in pos:
            for sub, delta in positions(node):
                lam = Lam(name, replace(node, sub, Var(name)))
                consume = None
                if isinstance(delta, FLeaf) and isinstance(delta.formula, CRDiv) and not free_vars(delta):
                    f = delta.formula
                    consume = ("⤉L", [(lam, f.right), (replace(ant, path, FLeaf(f.left)), goal)])
                elif not path and isinstance(goal, CProd) and not free_vars(delta):
                    consume = ("⊙R", [(delta, goal.left), (lam, goal.right)])
                if consume is None:
                    continue
                expanded = replace(ant, path, CComp(delta, lam))
                if not well_formed(expanded) or free_vars(lam):
                    continue
                rule, prem = consume
                yield "β", path, [((rule, (path if rule == "⤉L" else (), expanded), prem), goal)]
        if self.units and structure_size(ant) + 2 <= self.budget.max_structure_size:
            for path, node in pos:
                if isinstance(node, Var):
                    continue
                yield "∘1", path, [(replace(ant, path, Comp(node, ONE)), goal)]
                yield "1∘", path, [(replace(ant, path, Comp(ONE, node)), goal)]
        if self.options.allow_empty_antecedent:
            for path, node in pos:
                if isinstance(node, Comp) and node.right == ONE:
                    yield "∘1⁻¹", path, [(replace(ant, path, node.left), goal)]
                if isinstance(node, Comp) and node.left == ONE:
                    yield "1∘⁻¹", path, [(replace(ant, path, node.right), goal)]


def oracle_search(seq: Sequent, budget: Budget = Budget(), options: CalculusOptions = CalculusOptions()):
    return OracleProver(budget, options).prove(seq)


def oracle_prove(seq: Sequent, budget: Budget = Budget(), options: CalculusOptions = CalculusOptions()) -> bool:
    return oracle_search(seq, budget, options) is not None


# -- small-sequent corpus ---------------------------------------------------

_CTORS = (LDiv, RDiv, Prod, CLDiv, CRDiv, CProd)


def formulas_with(atom_pool, n, _cache=None):
    """All formulas over atom_pool with exactly n connectives, in a fixed order."""
    cache = {} if _cache is None else _cache
    if n in cache:
        return cache[n]
    if n == 0:
        out = [Atom(a) for a in atom_pool]
    else:
        out = [UNIT] if n == 1 else []
        for ctor in _CTORS:
            for i in range(n):
                for l in formulas_with(atom_pool, i, cache):
                    for r in formulas_with(atom_pool, n - 1 - i, cache):
                        out.append(ctor(l, r))
    cache[n] = out
    return out


def enumerate_small_sequents(atom_pool, max_connectives, max_antecedent_leaves, max_total_connectives=None):
    """Every Lambek-tree sequent within the bounds, each exactly once.

    max_connectives bounds each formula; max_total_connectives optionally
    bounds the sum over the whole sequent.
    """
    cache = {}
    forms = [(f, n) for n in range(max_connectives + 1) for f in formulas_with(atom_pool, n, cache)]
    total = max_total_connectives
    for k in range(1, max_antecedent_leaves + 1):
        shapes = bracketings(k)
        for combo in itertools.product(forms, repeat=k):
            used = sum(n for _, n in combo)
            if total is not None and used > total:
                continue
            leaves_ = [FLeaf(f) for f, _ in combo]
            for goal, gn in forms:
                if total is not None and used + gn > total:
                    continue
                for shape in shapes:
                    yield Sequent(comp_tree(leaves_, shape), goal)


def proof_to_json(p: SequentProof) -> str:
    return json.dumps(p.to_dict(), ensure_ascii=False)


def beta_normalize(s):
    """Contract every Δ ⊚ λx.Γ[x] redex in a structure (leftmost-outermost)."""
    while True:
        for path, node in positions(s):
            red = _beta(node) if isinstance(node, CComp) else "no"
            if not isinstance(red, str):
                s = replace(s, path, red)
                break
        else:
            return s
