import io
import json

from conftest import fixture_path

from nllam.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_parse_text():
    code, text = run("parse", "--lexicon", fixture_path("quant.lex"), "John saw everyone")
    assert code == 0
    assert text.startswith("1 result(s)")
    assert "β⁻¹⤈" in text


def test_parse_no_result_exits_1():
    code, _ = run("parse", "--lexicon", fixture_path("quant_nl.lex"), "John saw everyone")
    assert code == 1


def test_parse_json_and_trace():
    code, text = run("parse", "--lexicon", fixture_path("quant.lex"), "--format", "json", "everyone saw John")
    assert code == 0
    data = json.loads(text)
    assert data
    code, text = run("parse", "--lexicon", fixture_path("quant.lex"), "--trace", "John saw everyone")
    assert "Ax" in text


def test_empty_antecedent_flag():
    lex = fixture_path("adj.lex")
    assert run("parse", "--lexicon", lex, "very book")[0] == 1
    assert run("parse", "--lexicon", lex, "--empty-antecedent", "allow", "very book")[0] == 0


def test_prove_unit_insertion():
    assert run("prove", "a => a/1")[0] == 1
    code, text = run("prove", "--unit-insertion", "on", "a => a/1")
    assert code == 0
    assert text.startswith("provable")


def test_prove_structure():
    code, text = run("prove-structure", "(a:np o b:np\\s) => s")
    assert code == 0
    assert "nets" in text


def test_oracle_small():
    code, text = run("oracle", "--atoms", "a", "--max-connectives", "1", "--max-leaves", "2", "--max-total", "1")
    assert code == 0
    assert "0 disagreements" in text or "disagree" not in text.lower()


def test_export_dot():
    code, text = run("export", "--lexicon", fixture_path("quant.lex"), "--stage", "linked", "--format", "dot",
                     "John saw everyone")
    assert code == 0
    assert text.startswith("digraph")
    assert "doublecircle" in text


def test_grammar_commands():
    code, text = run("grammar", "mix", "--k", "3")
    assert code == 0
    assert "a3 : s/(1**(t3\\\\s))" in text
    code, text = run("grammar", "permclose", "--lexicon", fixture_path("quant.lex"))
    assert code == 0
    assert ":goal s" in text


def test_usage_errors_exit_2():
    assert run("parse", "--lexicon", "/no/such/file.lex", "x")[0] == 2
    assert run("prove", "a a")[0] == 2
    assert run("frobnicate")[0] == 2


def test_unknown_word_exits_2():
    assert run("parse", "--lexicon", fixture_path("quant.lex"), "John saw nobody")[0] == 2


def test_max_linkings_flag():
    code, _ = run("parse", "--lexicon", fixture_path("quant.lex"), "--max-linkings", "0", "John saw everyone")
    assert code == 2
