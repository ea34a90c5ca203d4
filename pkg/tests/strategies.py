from hypothesis import strategies as st

from nllam.formula import UNIT, Atom, CLDiv, CProd, CRDiv, LDiv, Prod, RDiv
from nllam.structure import CComp, Comp, FLeaf, Lam, Var

CTORS = (LDiv, RDiv, Prod, CLDiv, CRDiv, CProd)

atoms = st.sampled_from(["a", "b", "np", "s", "t2"]).map(Atom)

formulas = st.recursive(
    atoms | st.just(UNIT),
    lambda inner: st.tuples(st.sampled_from(CTORS), inner, inner).map(lambda t: t[0](t[1], t[2])),
    max_leaves=6,
)

leaves = st.tuples(formulas, st.sampled_from([None, "w", "john", "x1y"])).map(lambda t: FLeaf(*t))


@st.composite
def structures(draw, depth=3):
    """Closed linear structures; each binder's variable occurs once."""
    counter = iter(range(1000))

    def build(d):
        kind = draw(st.sampled_from(["leaf", "comp", "ccomp", "lam"] if d > 0 else ["leaf"]))
        if kind == "leaf":
            return draw(leaves)
        if kind == "lam":
            name = f"x{next(counter)}"
            body = build(d - 1)
            body = Comp(Var(name), body) if draw(st.booleans()) else CComp(body, Var(name))
            return Lam(name, body)
        ctor = Comp if kind == "comp" else CComp
        return ctor(build(d - 1), build(d - 1))

    return build(depth)
