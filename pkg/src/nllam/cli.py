"""Command-line interface: parse, prove, prove-structure, oracle, export, grammar."""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace as dc_replace

from .aps import to_aps
from .export import to_dot
from .formula import FormulaSyntaxError, parse_formula, print_formula
from .grammar import (LexiconSyntaxError, LimitExceeded, Limits, UnknownWord, load_lexicon, mix_lexicon,
                      parse, parse_hypotheses, permutation_closure, prove_sequent, prove_structure)
from .proofnet import apply_linking, enumerate_linkings, unfold_sequent
from .rewrite import EngineOptions, is_proof_net
from .sequent_calculus import Budget, CalculusOptions, BudgetExceeded, check_proof, enumerate_small_sequents, oracle_prove
from .structure import StructureSyntaxError, parse_sequent, print_structure

EXIT_OK, EXIT_NO, EXIT_ERR = 0, 1, 2


class UsageError(Exception):
    pass


def _onoff(v):
    return None if v is None else v in ("on", "allow")


def engine_options(args, base: EngineOptions = EngineOptions()) -> EngineOptions:
    kw = {}
    if getattr(args, "empty_antecedent", None) is not None:
        kw["allow_empty_antecedent"] = _onoff(args.empty_antecedent)
    if getattr(args, "unit_insertion", None) is not None:
        kw["unit_insertion"] = _onoff(args.unit_insertion)
    if getattr(args, "eta", None) is not None:
        kw["eta"] = _onoff(args.eta)
    return dc_replace(base, **kw)


def _limits(args):
    return Limits(getattr(args, "max_linkings", None), getattr(args, "max_solutions", None))


def _step_ledger(trace):
    sizes = trace.sizes()
    return [f"{s.name} ({sizes[i]}->{sizes[i + 1]})" for i, s in enumerate(trace.steps)]


def _report(results, args, out, header=""):
    fmt = args.format
    if fmt == "json":
        doc = [{"words": r.word_sequence, "formulas": [print_formula(f) for f in r.formulas],
                "goal": print_formula(r.goal), "antecedent": print_structure(r.antecedent),
                "linking": r.linking.to_json(), "trace": r.trace.to_json(),
                "proof": r.sequent_proof.to_dict()} for r in results]
        out.write(json.dumps(doc, ensure_ascii=False, indent=1) + "\n")
        return
    if fmt == "dot":
        for r in results:
            out.write(to_dot(r.trace.start))
        return
    if header:
        out.write(header + "\n")
    out.write(f"{len(results)} result(s)\n")
    for i, r in enumerate(results, 1):
        out.write(f"[{i}] {print_structure(r.antecedent)} => {print_formula(r.goal)}\n")
        out.write(f"    size {r.trace.start.size()}, steps: {', '.join(_step_ledger(r.trace)) or 'none'}\n")
        if args.trace:
            out.write(r.sequent_proof.render(4) + "\n")


def cmd_parse(args, out):
    lex = load_lexicon(args.lexicon)
    if args.goal:
        lex.goals = [parse_formula(args.goal)]
    opts = engine_options(args, lex.options)
    results = parse(lex, args.sentence, _limits(args), opts, seed=args.seed)
    _report(results, args, out)
    return EXIT_OK if results else EXIT_NO


def _split_sequent(text):
    if "=>" not in text:
        raise UsageError("sequent needs '=>'")
    ant, goal = text.rsplit("=>", 1)
    return ant, parse_formula(goal.strip())


def cmd_prove(args, out):
    ant, goal = _split_sequent(args.sequent)
    opts = engine_options(args)
    results = prove_sequent(parse_hypotheses(ant), goal, opts, _limits(args))
    if args.format == "text":
        out.write(("provable" if results else "not provable") + "\n")
    _report(results, args, out)
    return EXIT_OK if results else EXIT_NO


def cmd_prove_structure(args, out):
    seq = parse_sequent(args.sequent)
    opts = engine_options(args)
    v = prove_structure(seq, opts, _limits(args))
    if args.format == "json":
        out.write(json.dumps({"provable": v.provable, "method": v.method,
                              "proof": v.proof.to_dict() if v.proof else None}, ensure_ascii=False) + "\n")
    else:
        out.write(f"{'provable' if v.provable else 'not provable'} (decided by {v.method})\n")
        if v.proof is not None and args.trace:
            out.write(v.proof.render(2) + "\n")
    return EXIT_OK if v.provable else EXIT_NO


def net_provable(seq, opts: EngineOptions, check=False):
    """Is this Lambek-tree sequent provable according to proof nets?"""
    v = prove_structure(seq, opts, Limits())
    if check and v.proof is not None and not check_proof(v.proof):
        raise AssertionError(f"sequentialized proof rejected for {seq}")
    return v.provable


def cmd_oracle(args, out):
    atoms = [a.strip() for a in args.atoms.split(",") if a.strip()]
    opts = engine_options(args)
    copts = CalculusOptions(opts.allow_empty_antecedent)
    budget = Budget(max_depth=args.depth, max_nodes=args.max_nodes)
    t0 = time.time()
    table = {(True, True): 0, (False, False): 0, (True, False): 0, (False, True): 0}
    over = 0
    bad = []
    for seq in enumerate_small_sequents(atoms, args.max_connectives, args.max_leaves, args.max_total):
        try:
            o = oracle_prove(seq, budget, copts)
        except BudgetExceeded:
            over += 1
            continue
        n = net_provable(seq, opts, check=True)
        table[(n, o)] += 1
        if n != o and len(bad) < 20:
            bad.append(str(seq))
    out.write("nets\\oracle  provable  unprovable\n")
    out.write(f"provable     {table[(True, True)]:>8}  {table[(True, False)]:>10}\n")
    out.write(f"unprovable   {table[(False, True)]:>8}  {table[(False, False)]:>10}\n")
    out.write(f"oracle budget exceeded: {over}; time {time.time() - t0:.1f}s\n")
    for b in bad:
        out.write(f"disagreement: {b}\n")
    return EXIT_OK if not (table[(True, False)] or table[(False, True)]) else EXIT_NO


def _export_target(args):
    opts = engine_options(args)
    if args.lexicon:
        lex = load_lexicon(args.lexicon)
        if args.goal:
            lex.goals = [parse_formula(args.goal)]
        words = args.input.split()
        hyps = [(w, lex.lookup(w)[0]) for w in words]
        goal = lex.goals[0]
        opts = engine_options(args, lex.options)
    else:
        ant, goal = _split_sequent(args.input)
        hyps = parse_hypotheses(ant)
    ps = unfold_sequent(hyps, goal)
    if args.stage == "unfolded":
        return ps
    linkings = list(enumerate_linkings(ps, opts.unit_insertion))
    if args.linking is not None:
        if not 0 <= args.linking < len(linkings):
            raise UsageError(f"linking index out of range (0..{len(linkings) - 1})")
        chosen = linkings[args.linking]
    else:
        chosen = next((e for e in linkings if is_proof_net(ps, e, opts)), linkings[0] if linkings else None)
        if chosen is None:
            raise UsageError("no linking")
    linked = apply_linking(ps, chosen)
    if args.stage == "linked":
        return linked
    g = to_aps(linked)
    if args.stage == "aps":
        return g
    t = is_proof_net(ps, chosen, opts)
    if t is None:
        raise UsageError("the chosen linking is not a proof net")
    return t.end


def cmd_export(args, out):
    g = _export_target(args)
    if args.format == "dot":
        out.write(to_dot(g))
    else:
        doc = g.to_json()
        out.write(json.dumps(doc, ensure_ascii=False, indent=1) + "\n")
    return EXIT_OK


def cmd_permclose(args, out):
    lex = permutation_closure(load_lexicon(args.lexicon))
    return _lexicon_or_parse(lex, args, out)


def cmd_mix(args, out):
    lex = mix_lexicon(args.k)
    if not args.no_closure:
        lex = permutation_closure(lex)
    return _lexicon_or_parse(lex, args, out)


def _lexicon_or_parse(lex, args, out):
    if not args.sentence:
        out.write(lex.dumps())
        return EXIT_OK
    results = parse(lex, args.sentence, _limits(args), engine_options(args, lex.options), seed=args.seed)
    _report(results, args, out)
    return EXIT_OK if results else EXIT_NO


def _engine_flags(p):
    p.add_argument("--empty-antecedent", choices=["allow", "forbid"], default=None)
    p.add_argument("--unit-insertion", choices=["on", "off"], default=None)
    p.add_argument("--eta", choices=["on", "off"], default=None)
    p.add_argument("--max-linkings", type=int, default=None)
    p.add_argument("--max-solutions", type=int, default=None)
    p.add_argument("--format", choices=["text", "json", "dot"], default="text")
    p.add_argument("--trace", action="store_true", help="print sequent proofs")
    p.add_argument("--seed", type=int, default=None, help="random tie-breaking in eager normalization")


def build_parser():
    ap = argparse.ArgumentParser(prog="nllam", description="NLλ proof nets by graph rewriting")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a sentence with a lexicon")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--goal")
    _engine_flags(p)
    p.add_argument("sentence")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("prove", help="prove 'A, B => C' for some bracketing")
    _engine_flags(p)
    p.add_argument("sequent")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("prove-structure", help="prove a sequent with a given antecedent structure")
    _engine_flags(p)
    p.add_argument("sequent")
    p.set_defaults(func=cmd_prove_structure)

    p = sub.add_parser("oracle", help="compare proof nets with sequent search on small sequents")
    _engine_flags(p)
    p.add_argument("--atoms", default="a,b")
    p.add_argument("--max-connectives", type=int, default=2)
    p.add_argument("--max-leaves", type=int, default=3)
    p.add_argument("--max-total", type=int, default=None, help="connectives per sequent")
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--max-nodes", type=int, default=200_000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export", help="export a structure as DOT or JSON")
    _engine_flags(p)
    p.add_argument("--lexicon")
    p.add_argument("--goal")
    p.add_argument("--stage", choices=["unfolded", "linked", "aps", "normal"], default="aps")
    p.add_argument("--linking", type=int, default=None, help="index into the linking enumeration")
    p.add_argument("input", help="sentence (with --lexicon) or sequent 'A, B => C'")
    p.set_defaults(func=cmd_export)

    g = sub.add_parser("grammar", help="formal-language constructions")
    gs = g.add_subparsers(dest="grammar_command", required=True)
    p = gs.add_parser("permclose", help="permutation closure of a lexicon")
    p.add_argument("--lexicon", required=True)
    _engine_flags(p)
    p.add_argument("sentence", nargs="?")
    p.set_defaults(func=cmd_permclose)
    p = gs.add_parser("mix", help="MIX_k lexicon (permutation-closed unless --no-closure)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--no-closure", action="store_true")
    _engine_flags(p)
    p.add_argument("sentence", nargs="?")
    p.set_defaults(func=cmd_mix)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERR if e.code else EXIT_OK
    if args.command != "export" and getattr(args, "format", "text") == "dot" and args.command not in ("parse",):
        args.format = "text"
    try:
        return args.func(args, out)
    except (OSError, FormulaSyntaxError, StructureSyntaxError, LexiconSyntaxError, UsageError,
            UnknownWord, LimitExceeded, ValueError) as e:
        sys.stderr.write(f"nllam: {type(e).__name__}: {e}\n")
        return EXIT_ERR


if __name__ == "__main__":
    sys.exit(main())
