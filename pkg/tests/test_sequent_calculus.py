import json


from nllam.formula import parse_formula
from nllam.sequent_calculus import (Budget, CalculusOptions, SequentProof, beta_normalize, check_proof,
                                    enumerate_small_sequents, explain_proof, oracle_prove, oracle_search,
                                    proof_to_json)
from nllam.structure import ONE, CComp, Comp, FLeaf, Lam, Sequent, Var, is_lambek_tree, parse_sequent

P = parse_formula


def ax(f, w=None):
    f = P(f) if isinstance(f, str) else f
    return SequentProof("Ax", Sequent(FLeaf(f, w), f))


def test_axiom_checks():
    assert check_proof(ax("np"))
    bad = SequentProof("Ax", Sequent(FLeaf(P("np")), P("s")))
    assert not check_proof(bad)
    assert explain_proof(bad)[0] == "Ax"


def test_slash_left_application():
    np, s = P("np"), P("s")
    concl = Sequent(Comp(FLeaf(P("np\\s")), FLeaf(np)), s)
    wrong = SequentProof("\\L", concl, [ax("np"), ax("s")], ())
    assert not check_proof(wrong)
    good = SequentProof("\\L", Sequent(Comp(FLeaf(np), FLeaf(P("np\\s"))), s), [ax("np"), ax("s")], ())
    assert check_proof(good)


def test_found_proofs_check():
    for text in ["(a:np o b:np\\s) => s",
                 "a:np => s/(np\\s)",
                 "(a:s//(np\\\\s) o (b:(np\\s)/np o c:np)) => s",
                 "(j:np o (s:(np\\s)/np o e:s//(np\\\\s))) => s"]:
        p = oracle_search(parse_sequent(text))
        assert p is not None, text
        assert check_proof(p), text


def test_non_theorems():
    for text in ["a:np => s", "(a:np\\s o b:np) => s", "(a:s/(np\\s) o (b:(np\\s)/np o c:np)) => np"]:
        assert not oracle_prove(parse_sequent(text)), text


def test_in_situ_quantifier_needs_continuation_mode():
    seq = parse_sequent("(j:np o (s:(np\\s)/np o e:s/(np\\s))) => s")
    assert not oracle_prove(seq)
    seq = parse_sequent("(j:np o (s:(np\\s)/np o e:s//(np\\\\s))) => s")
    assert oracle_prove(seq)


def test_empty_antecedent_option():
    seq = parse_sequent("(v:(n/n)/(n/n) o b:n) => n")
    assert not oracle_prove(seq)
    assert oracle_prove(seq, options=CalculusOptions(allow_empty_antecedent=True))


def test_units():
    assert oracle_prove(Sequent(ONE, P("1")))
    assert oracle_prove(parse_sequent("a:a/1 => a"))


def test_beta_rule_node():
    lam = Lam("x", Comp(Var("x"), FLeaf(P("np\\s"))))
    redex = CComp(FLeaf(P("np")), lam)
    assert beta_normalize(redex) == Comp(FLeaf(P("np")), FLeaf(P("np\\s")))
    premiss = SequentProof("\\L", Sequent(Comp(FLeaf(P("np")), FLeaf(P("np\\s"))), P("s")),
                           [ax("np"), ax("s")], ())
    step = SequentProof("β⁻¹", Sequent(redex, P("s")), [premiss], ())
    assert check_proof(step)
    assert not check_proof(SequentProof("β", Sequent(redex, P("s")), [premiss], ()))


def test_budget_limits_search():
    seq = parse_sequent("(j:np o (s:(np\\s)/np o e:s//(np\\\\s))) => s")
    assert not oracle_prove(seq, Budget(max_depth=1))


def test_proof_json_round_trip():
    p = oracle_search(parse_sequent("(a:np o b:np\\s) => s"))
    d = json.loads(proof_to_json(p))
    q = SequentProof.from_dict(d)
    assert check_proof(q)
    assert q.rules_used() == p.rules_used()


def test_small_sequent_enumeration():
    seqs = list(enumerate_small_sequents(["a"], 1, 2, max_total_connectives=1))
    assert len(seqs) == len(set(map(str, seqs)))
    assert all(is_lambek_tree(s.antecedent) for s in seqs)
    assert any(str(s) == "_:a => a" for s in seqs)
