import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import formulas

from nllam.formula import Atom, parse_formula
from nllam.proofnet import (ArityMismatch, ExtendedLinking, Link, MalformedStructure, ProofStructure,
                            apply_linking, count_linkings, enumerate_linkings, hypotheses_and_conclusions,
                            partial_linkings, unfold, unfold_sequent)
from nllam.formula import Polarity

P = parse_formula


def quant():
    return unfold_sequent([("John", P("np")), ("saw", P("(np\\s)/np")), ("everyone", P("s//(np\\\\s)"))], P("s"))


def test_unfold_transitive_verb():
    ps = unfold(P("(np\\s)/np"), Polarity.HYPOTHESIS)
    shapes = sorted(l.shape for l in ps.links.values())
    assert shapes == ["/L", "\\L"]
    assert all(not l.is_par for l in ps.links.values())


def test_unfold_conclusion_gives_par_links():
    ps = unfold(P("s//(np\\\\s)"), Polarity.CONCLUSION)
    kinds = {l.shape: l.is_par for l in ps.links.values()}
    assert kinds == {"⤉R": True, "⤈L": False}


def test_quantifier_listing():
    ps = quant()
    hyps, concl = hypotheses_and_conclusions(ps)
    names = sorted(str(f) for f in hyps)
    assert names == sorted(["np", "(np\\s)/np", "np", "np", "s//(np\\\\s)", "s"])
    assert sorted(str(f) for f in concl) == sorted(["np", "s", "s", "np", "s"])
    assert count_linkings(ps) == 4
    assert len(list(enumerate_linkings(ps))) == 4


def test_par_main_tentacle():
    ps = unfold(P("a/b"), Polarity.CONCLUSION)
    (l,) = ps.links.values()
    assert l.shape == "/R"
    assert l.main == l.conclusions[0]


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        count_linkings(unfold_sequent([("w", P("np"))], P("s")))
    with pytest.raises(ArityMismatch):
        list(enumerate_linkings(unfold_sequent([("w", P("a"))], P("a/1"))))
    assert count_linkings(unfold_sequent([("w", P("a"))], P("a/1")), unit_insertion=True) == 1


def test_surplus_unit_is_allowed():
    ps = unfold_sequent([("w", P("a/1"))], P("a"))
    (e,) = list(enumerate_linkings(ps))
    assert e.unit_pairs == ()


def test_apply_linking_checks_pairs():
    ps = quant()
    e = next(enumerate_linkings(ps))
    linked = apply_linking(ps, e)
    assert linked.linked
    assert linked.open_ends() == ([], [])
    broken = ExtendedLinking(e.atom_pairs[:-1], e.unit_pairs)
    with pytest.raises(MalformedStructure):
        apply_linking(ps, broken)


def test_json_round_trip():
    ps = quant()
    d = json.loads(json.dumps(ps.to_json()))
    back = ProofStructure.from_json(d)
    assert back.to_json() == ps.to_json()


def test_two_links_cannot_share_a_conclusion():
    l1 = Link(0, "/L", (0, 1), (2,))
    l2 = Link(1, "\\L", (3, 4), (2,))
    ps = ProofStructure({v: Atom("a") for v in range(5)}, {0: l1, 1: l2}, [], [])
    with pytest.raises(MalformedStructure):
        ps.above()


def _brute_force(ps):
    """Bijections from all conclusion ends to all hypothesis ends that respect atoms."""
    hyp, con = ps.open_ends()
    if len(hyp) != len(con):
        return 0
    n = 0
    for perm in itertools.permutations(con):
        if all(ps.formulas[h] == ps.formulas[c] for h, c in zip(hyp, perm)):
            n += 1
    return n


sequents = st.tuples(st.lists(formulas, min_size=1, max_size=2), formulas)


@settings(max_examples=150, deadline=None)
@given(sequents)
def test_linking_count_matches_brute_force(seq):
    hyps, goal = seq
    ps = unfold_sequent([(f"w{i}", f) for i, f in enumerate(hyps)], goal)
    hyp, _ = ps.open_ends()
    if len(hyp) > 7:
        return
    tl, tr = ps.unit_links()
    try:
        n = count_linkings(ps)
    except ArityMismatch:
        assert _brute_force(ps) == 0 or len(tl) > len(tr)
        return
    units = 1
    for i in range(len(tr) - len(tl) + 1, len(tr) + 1):
        units *= i
    assert n == _brute_force(ps) * units
    all_links = list(enumerate_linkings(ps))
    assert len(all_links) == n
    assert len(set(all_links)) == n
    pruned = list(partial_linkings(ps))
    assert set(pruned) <= set(all_links)
