import pytest
from hypothesis import given

from strategies import structures

from nllam.formula import Atom, parse_formula
from nllam.structure import (ONE, CComp, Comp, FLeaf, Lam, NotLambekTree, Sequent, StructureSyntaxError, Var,
                             alpha_equal, bracketings, comp_tree, free_vars, is_end_sequent, is_lambek_tree,
                             leaves, parse_sequent, parse_structure, print_structure, substitute, well_formed,
                             yield_)

np, s = Atom("np"), Atom("s")


def test_parse_and_print():
    text = "(John:np o (saw:(np\\s)/np o Mary:np))"
    st = parse_structure(text)
    assert print_structure(st) == text
    assert yield_(st) == ["John", "saw", "Mary"]


def test_lambda_and_unit_syntax():
    st = parse_structure("(everyone:s//(np\\\\s) @ \\x.(John:np o x))")
    assert isinstance(st, CComp)
    assert isinstance(st.right, Lam)
    assert parse_structure("1") == ONE
    assert parse_structure("_:np") == FLeaf(np, None)


def test_sequent_syntax():
    seq = parse_sequent("(a:np o b:np\\s) => s")
    assert seq.succedent == s
    assert is_end_sequent(seq)
    assert is_end_sequent(Sequent(ONE, parse_formula("1")))
    assert not is_end_sequent(Sequent(ONE, s))


@pytest.mark.parametrize("text", ["(a:np o", "(a:np x b:np)", "\\.a:np", "a:np b:np", ""])
def test_bad_structures(text):
    with pytest.raises(StructureSyntaxError):
        parse_structure(text)


def test_alpha_equivalence_ignores_bound_names():
    a = parse_structure("\\x.(x o w:np)")
    b = parse_structure("\\y.(y o w:np)")
    c = parse_structure("\\y.(y o v:np)")
    assert alpha_equal(a, b)
    assert not alpha_equal(a, c)
    assert alpha_equal(a, c, ignore_origins=True)


def test_lambek_tree_and_yield():
    assert is_lambek_tree(Comp(FLeaf(np), FLeaf(s)))
    assert not is_lambek_tree(CComp(FLeaf(np), FLeaf(s)))
    with pytest.raises(NotLambekTree):
        yield_(Lam("x", Comp(Var("x"), FLeaf(np))))


def test_well_formedness_needs_linear_binding():
    assert well_formed(Lam("x", Comp(Var("x"), FLeaf(np))))
    assert not well_formed(Lam("x", FLeaf(np)))
    assert not well_formed(Comp(Var("x"), Var("x")))


def test_substitute_and_free_vars():
    body = Comp(Var("x"), FLeaf(np))
    assert free_vars(body) == {"x"}
    assert substitute(body, "x", FLeaf(s)) == Comp(FLeaf(s), FLeaf(np))


def test_bracketings_are_catalan():
    assert [len(bracketings(n)) for n in range(1, 6)] == [1, 1, 2, 5, 14]
    lv = [FLeaf(np, str(i)) for i in range(3)]
    trees = [comp_tree(lv, b) for b in bracketings(3)]
    assert all(leaves(t) == lv for t in trees)


@given(structures())
def test_structure_round_trip(st):
    assert well_formed(st)
    assert alpha_equal(parse_structure(print_structure(st)), st)
