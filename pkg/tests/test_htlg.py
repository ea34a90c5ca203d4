import json

import pytest

from conftest import fixture_path

from nllam.aps import APS
from nllam.formula import Atom
from nllam.htlg import (Lin, TApp, TCat, TermSyntaxError, TLam, TVar, TWord, Untranslatable, beta_reduce_termgraph,
                        find_beta_redexes, isomorphic_mirror, lexical_aps, lexical_termgraph, mirror_translate,
                        parse_htlg_formula, parse_term, print_htlg_formula, read_back_formula)
from nllam.proofnet import Link


def test_linear_implication_is_right_associative():
    f = parse_htlg_formula("np -o np -o s")
    assert f == Lin(Atom("np"), Lin(Atom("np"), Atom("s")))
    assert parse_htlg_formula("(np -o s) -o s") == Lin(Lin(Atom("np"), Atom("s")), Atom("s"))
    assert print_htlg_formula(parse_htlg_formula("(np -o s) -o s")) == "(np -o s) -o s"


def test_term_syntax():
    t = parse_term("λP.(P everyone)")
    assert t == TLam("P", TApp(TVar("P"), TWord("everyone")))
    assert parse_term("(a + b)") == TCat(TWord("a"), TWord("b"))
    with pytest.raises(TermSyntaxError):
        parse_term("(a + ")


def test_quantifier_term_graph():
    g = lexical_termgraph("(np -o s) -o s", "λP.(P everyone)")
    assert len(find_beta_redexes(g)) == 1
    reduced, n = beta_reduce_termgraph(g, with_count=True)
    assert n == 1
    assert isomorphic_mirror(lexical_aps("everyone", "s//(np\\\\s)"), reduced)
    assert not isomorphic_mirror(lexical_aps("everyone", "s/(np\\s)"), reduced)


def test_beta_reduction_shrinks_graph():
    g = lexical_termgraph("(tv -o s) -o (tv -o s) -o tv -o s", "λS2.λS1.λV.((S1 V) + (and + (S2 ε)))")
    sizes = [len(g.links)]
    while find_beta_redexes(g):
        g = _one_step(g)
        sizes.append(len(g.links))
    assert sizes == sorted(sizes, reverse=True)
    assert len(set(sizes)) == len(sizes)


def _one_step(g):
    from nllam.htlg import beta_step
    return beta_step(g, find_beta_redexes(g)[0])


def test_gapping_read_back():
    g = lexical_termgraph("(tv -o s) -o (tv -o s) -o tv -o s", "λS2.λS1.λV.((S1 V) + (and + (S2 ε)))")
    reduced, n = beta_reduce_termgraph(g, with_count=True)
    assert n == 3
    back = mirror_translate(reduced)
    assert back.alphabet == "nllam"
    (v,) = [v for v, w in back.words.items() if w == "and"]
    assert str(read_back_formula(back, v)) == "((tv**(tv\\\\s))\\s)/(1**(tv\\\\s))"


def test_mirror_is_an_involution():
    a = lexical_aps("everyone", "s//(np\\\\s)")
    there = mirror_translate(a)
    back = mirror_translate(there)
    assert {l.shape for l in there.links.values()} <= {"+", "@", "λt", "λpar", "ε", "/R", "\\R", "•L"}
    assert {l.id: l.shape for l in back.links.values()} == {l.id: l.shape for l in a.links.values()}


def test_untranslatable_links():
    g = APS([0, 1, 2], {0: Link(0, "⤉R", (0,), (1, 2))})
    with pytest.raises(Untranslatable):
        mirror_translate(g)
    g = APS([0], {0: Link(0, "tL", (0,), ())})
    with pytest.raises(Untranslatable):
        mirror_translate(g)


def test_dutch_fixture_loads():
    with open(fixture_path("dutch_htlg.json")) as f:
        g = APS.from_json(json.load(f))
    assert g.alphabet == "htlg"
    assert len(g.links) == 11
    assert len(g.word_order) == 8
