"""Naive reference semantics written straight from the definitions.

Sets are frozensets of ints and the order is a set of pairs (x, y) meaning
x refines y.  Nothing here imports the package, so agreement with it is an
independent check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass


@dataclass(frozen=True)
class NaiveFrame:
    states: frozenset
    leq: frozenset              # (x, y): x refines y
    rels: dict                  # index -> frozenset of pairs
    props: frozenset | None     # None means every regular open set

    def below(self, x):
        return frozenset(y for y in self.states if (y, x) in self.leq)

    def succ(self, i, x):
        return frozenset(y for (a, y) in self.rels[i] if a == x)


def from_library(frame) -> NaiveFrame:
    n = frame.n
    states = frozenset(range(n))
    leq = frozenset((x, y) for y in range(n) for x in range(n) if frame.poset.down[y] >> x & 1)
    rels = {i: frozenset((x, y) for x in range(n) for y in range(n) if s[x] >> y & 1)
            for i, s in frame.rels.items()}
    props = frozenset(frozenset(y for y in range(n) if X >> y & 1) for X in frame.props)
    return NaiveFrame(states, leq, rels, props)


def to_mask(xs):
    return sum(1 << x for x in xs)


def compatible(F, a, b):
    return any((c, a) in F.leq and (c, b) in F.leq for c in F.states)


def interior(F, X):
    return frozenset(y for y in F.states if F.below(y) <= X)


def closure(F, X):
    return frozenset(y for y in F.states if F.below(y) & X)


def persistent(F, X):
    return all(F.below(x) <= X for x in X)


def refinable(F, X):
    # x ∉ X implies some refinement of x has all its refinements outside X
    return all(any(not (F.below(y) & X) for y in F.below(x)) for x in F.states - X)


def regular_opens(F):
    S = sorted(F.states)
    out = []
    for r in range(len(S) + 1):
        for c in itertools.combinations(S, r):
            X = frozenset(c)
            if persistent(F, X) and refinable(F, X):
                out.append(X)
    return out


def box(F, i, X):
    return frozenset(x for x in F.states if F.succ(i, x) <= X)


def ro_closed_under_box(F, i):
    ro = set(regular_opens(F))
    return all(box(F, i, X) in ro for X in ro)


# -------------------------------------------------------------- interplay

def r_rule(F, i):
    for (x1, x) in F.leq:
        for y1 in F.succ(i, x1):
            for z in F.states:
                if compatible(F, y1, z) and not any(compatible(F, y, z) for y in F.succ(i, x)):
                    return False
    return True


def up_r(F, i):
    return all(F.succ(i, x1) <= F.succ(i, x) for (x1, x) in F.leq)


def r_down(F, i):
    return all(F.below(y) <= F.succ(i, x) for x in F.states for y in F.succ(i, x))


def _game(F, i, x, y, win):
    return all(any(all(any(win(y2, y1) and y2 in F.succ(i, x2) for y2 in F.states)
                       for x2 in F.below(x1))
                   for x1 in F.below(x))
               for y1 in F.below(y))


def r_implies_win(F, i):
    return all(_game(F, i, x, y, lambda a, b: compatible(F, a, b))
               for x in F.states for y in F.succ(i, x))


def r_implies_win_under(F, i):
    return all(_game(F, i, x, y, lambda a, b: (a, b) in F.leq)
               for x in F.states for y in F.succ(i, x))


def r_iff_win_under(F, i):
    return all((y in F.succ(i, x)) == _game(F, i, x, y, lambda a, b: (a, b) in F.leq)
               for x in F.states for y in F.states)


def r_refinability(F, i):
    return all(any(all(F.succ(i, x2) & F.below(y) for x2 in F.below(x1)) for x1 in F.below(x))
               for x in F.states for y in F.succ(i, x))


def r_dense(F, i):
    return all(y in F.succ(i, x) for x in F.states for y in F.states
               if all(F.below(y1) & F.succ(i, x) for y1 in F.below(y)))


# ---------------------------------------------------------------- forcing

def forces(F, val, x, f):
    kind = type(f).__name__
    if kind == "Var":
        return x in val.get(f.name, frozenset())
    if kind == "Neg":
        return all(not forces(F, val, y, f.child) for y in F.below(x))
    if kind == "And":
        return forces(F, val, x, f.left) and forces(F, val, x, f.right)
    if kind == "Imp":
        return all(forces(F, val, y, f.right) for y in F.below(x) if forces(F, val, y, f.left))
    return all(forces(F, val, y, f.child) for y in F.succ(f.index, x))


def truth_set(F, val, f):
    return frozenset(x for x in F.states if forces(F, val, x, f))


def variables(f):
    kind = type(f).__name__
    if kind == "Var":
        return {f.name}
    if kind in ("Neg", "Box"):
        return variables(f.child)
    return variables(f.left) | variables(f.right)


def valid(F, f):
    names = sorted(variables(f) - {"#v"})
    fam = sorted(F.props if F.props is not None else regular_opens(F), key=sorted)
    for choice in itertools.product(fam, repeat=len(names)):
        val = dict(zip(names, choice))
        if truth_set(F, val, f) != F.states:
            return False
    return True


def kripke_valid(F, f):
    """Classical validity: valuations range over all subsets, order ignored."""
    names = sorted(variables(f) - {"#v"})
    S = sorted(F.states)
    subsets = [frozenset(c) for r in range(len(S) + 1) for c in itertools.combinations(S, r)]

    def sat(val, w, g):
        kind = type(g).__name__
        if kind == "Var":
            return w in val.get(g.name, frozenset())
        if kind == "Neg":
            return not sat(val, w, g.child)
        if kind == "And":
            return sat(val, w, g.left) and sat(val, w, g.right)
        if kind == "Imp":
            return (not sat(val, w, g.left)) or sat(val, w, g.right)
        return all(sat(val, v, g.child) for v in F.succ(g.index, w))

    for choice in itertools.product(subsets, repeat=len(names)):
        val = dict(zip(names, choice))
        if not all(sat(val, w, f) for w in S):
            return False
    return True
