import os
import random

import pytest

import nllam
from nllam.aps import to_aps
from nllam.formula import UNIT, Atom, CLDiv, CProd, CRDiv, LDiv, Prod, RDiv
from nllam.grammar import load_lexicon
from nllam.proofnet import ArityMismatch, apply_linking, count_linkings, enumerate_linkings, unfold_sequent

FIXTURES = os.path.join(os.path.dirname(nllam.__file__), "fixtures")

CTORS = (LDiv, RDiv, Prod, CLDiv, CRDiv, CProd)


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def lexicon(name):
    return load_lexicon(fixture_path(name))


def random_formula(rng, depth, atoms=("a", "b"), units=False):
    if depth == 0 or rng.random() < 0.2:
        if units and rng.random() < 0.15:
            return UNIT
        return Atom(rng.choice(atoms))
    ctor = rng.choice(CTORS)
    return ctor(random_formula(rng, depth - 1, atoms, units), random_formula(rng, depth - 1, atoms, units))


def random_linked_aps(rng, max_links=12, units=False):
    """A random linked abstract proof structure, or None if the draw has no
    linking or is too big."""
    n = rng.randint(1, 3)
    hyps = [(f"w{i}", random_formula(rng, 3, units=units)) for i in range(n)]
    goal = random_formula(rng, 3, units=units)
    ps = unfold_sequent(hyps, goal)
    try:
        if count_linkings(ps) > 500:
            return None
        linkings = list(enumerate_linkings(ps))
    except ArityMismatch:
        return None
    if not linkings:
        return None
    g = to_aps(apply_linking(ps, rng.choice(linkings)))
    if len(g.links) > max_links:
        return None
    return g


def random_structures(count, seed=0, max_links=12, units=False):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = random_linked_aps(rng, max_links, units)
        if g is not None:
            out.append(g)
    return out


@pytest.fixture
def quant_lex():
    return lexicon("quant.lex")


ACCEPTANCE = {}


@pytest.fixture
def gate(request):
    """Record one acceptance criterion; the verdict is the test outcome."""
    def record(number, title):
        ACCEPTANCE[number] = (title, request.node.nodeid)
    return record


def pytest_runtest_makereport(item, call):
    if call.when == "call":
        for number, entry in ACCEPTANCE.items():
            if entry[1] == item.nodeid:
                ACCEPTANCE[number] = entry[:2] + ("PASS" if call.excinfo is None else "FAIL",)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    for number in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[number]
        verdict = entry[2] if len(entry) > 2 else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {entry[0]}")
