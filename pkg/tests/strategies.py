"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from possibility.formula import And, Box, Imp, Neg, Var

VAR_NAMES = ("p1", "p2", "q")
INDICES = ("i", "j")


def formulas(max_leaves: int = 12, names=VAR_NAMES, indices=INDICES):
    leaves = st.sampled_from(names).map(Var)

    def extend(children):
        return st.one_of(
            children.map(Neg),
            st.tuples(children, children).map(lambda t: And(*t)),
            st.tuples(children, children).map(lambda t: Imp(*t)),
            st.tuples(st.sampled_from(indices), children).map(lambda t: Box(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)
