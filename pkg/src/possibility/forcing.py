"""Forcing, truth sets and validity over possibility frames, plus classical
Kripke satisfaction as a baseline."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .formula import RESERVED_VAR, And, Box, Formula, Imp, Neg, Var, variables
from .frame import CheckReport, FrameError, PossibilityFrame, bits, members, validate_frame

DEFAULT_BUDGET = 10 ** 7


class BudgetExceeded(RuntimeError):
    pass


class UnboundSymbol(KeyError):
    pass


@dataclass
class Model:
    frame: PossibilityFrame
    valuation: Mapping[str, int]

    def __post_init__(self):
        for name, X in self.valuation.items():
            if X not in self.frame.prop_set:
                raise FrameError(f"value of {name!r} is not an admissible set")

    def value(self, name: str) -> int:
        if name in self.valuation:
            return self.valuation[name]
        if name == RESERVED_VAR:
            # the constants do not depend on this variable's value
            return self.frame.props[0] if not self.frame.extended else min(self.frame.props)
        raise UnboundSymbol(f"unbound variable {name!r}")


# ---------------------------------------------------------------- compiler

class Program:
    """A list of formulas compiled to a shared DAG of operations.

    Node layout: ("var", name) | ("neg", a) | ("and", a, b) | ("imp", a, b)
    | ("box", index, a), with children referring to earlier nodes.
    """

    def __init__(self, formulas: Iterable[Formula]):
        self.nodes: list[tuple] = []
        self._ids: dict[tuple, int] = {}
        self.roots = [self._add(f) for f in formulas]
        self.variables = sorted({nd[1] for nd in self.nodes if nd[0] == "var"})
        self.indices = sorted({nd[1] for nd in self.nodes if nd[0] == "box"})

    def _intern(self, node):
        k = self._ids.get(node)
        if k is None:
            k = self._ids[node] = len(self.nodes)
            self.nodes.append(node)
        return k

    def _add(self, f: Formula) -> int:
        # iterative post-order so deep formulas do not hit the recursion limit
        stack = [(f, False)]
        done: dict[int, int] = {}
        while stack:
            g, ready = stack.pop()
            if id(g) in done:
                continue
            if isinstance(g, Var):
                done[id(g)] = self._intern(("var", g.name))
                continue
            kids = [g.child] if isinstance(g, (Neg, Box)) else [g.left, g.right]
            if not ready:
                stack.append((g, True))
                stack.extend((c, False) for c in kids if id(c) not in done)
                continue
            ids = [done[id(c)] for c in kids]
            if isinstance(g, Neg):
                node = ("neg", ids[0])
            elif isinstance(g, Box):
                node = ("box", g.index, ids[0])
            elif isinstance(g, And):
                node = ("and", ids[0], ids[1])
            else:
                node = ("imp", ids[0], ids[1])
            done[id(g)] = self._intern(node)
        return done[id(f)]


class Evaluator:
    """Computes truth sets on one frame, caching the set operations."""

    def __init__(self, frame: PossibilityFrame, budget: int | None = None):
        self.frame = frame
        self._neg: dict[int, int] = {}
        self._imp: dict[tuple[int, int], int] = {}
        self._box: dict[tuple[str, int], int] = {}
        self.calls = 0
        self.budget = budget

    def neg(self, X):
        v = self._neg.get(X)
        if v is None:
            v = self._neg[X] = self.frame.neg(X)
        return v

    def imp(self, X, Y):
        v = self._imp.get((X, Y))
        if v is None:
            v = self._imp[(X, Y)] = self.frame.implication(X, Y)
        return v

    def box(self, i, X):
        v = self._box.get((i, X))
        if v is None:
            v = self._box[(i, X)] = self.frame.box(i, X)
        return v

    def run(self, prog: Program, env: Mapping[str, int]) -> list[int]:
        self.calls += self.frame.n
        if self.budget is not None and self.calls > self.budget:
            raise BudgetExceeded(f"forcing budget of {self.budget} calls exceeded")
        vals: list[int] = []
        for nd in prog.nodes:
            op = nd[0]
            if op == "var":
                vals.append(env[nd[1]])
            elif op == "neg":
                vals.append(self.neg(vals[nd[1]]))
            elif op == "and":
                vals.append(vals[nd[1]] & vals[nd[2]])
            elif op == "imp":
                vals.append(self.imp(vals[nd[1]], vals[nd[2]]))
            else:
                vals.append(self.box(nd[1], vals[nd[2]]))
        return vals


def _env_for(model: Model, prog: Program) -> dict[str, int]:
    for i in prog.indices:
        if i not in model.frame.rels:
            raise UnboundSymbol(f"unknown modal index {i!r}")
    return {v: model.value(v) for v in prog.variables}


def truth_set(model: Model, f: Formula) -> int:
    prog = Program([f])
    vals = Evaluator(model.frame).run(prog, _env_for(model, prog))
    return vals[prog.roots[0]]


def truth_sets(model: Model, formulas: Sequence[Formula]) -> list[int]:
    prog = Program(formulas)
    vals = Evaluator(model.frame).run(prog, _env_for(model, prog))
    return [vals[r] for r in prog.roots]


def forces(model: Model, state: int, f: Formula) -> bool:
    """Evaluates the forcing clauses directly at one state."""
    if not 0 <= state < model.frame.n:
        raise ValueError(f"state {state} out of range")
    return _forces(model, state, f)


def _forces(m: Model, x: int, f: Formula) -> bool:
    fr = m.frame
    down = fr.poset.down
    if isinstance(f, Var):
        return bool(m.value(f.name) >> x & 1)
    if isinstance(f, Neg):
        skip_bottom = fr.extended
        return not any(_forces(m, y, f.child) for y in bits(down[x])
                       if not (skip_bottom and y == 0))
    if isinstance(f, And):
        return _forces(m, x, f.left) and _forces(m, x, f.right)
    if isinstance(f, Imp):
        return all(_forces(m, y, f.right) for y in bits(down[x]) if _forces(m, y, f.left))
    if f.index not in fr.rels:
        raise UnboundSymbol(f"unknown modal index {f.index!r}")
    return all(_forces(m, y, f.child) for y in bits(fr.rels[f.index][x]))


# ----------------------------------------------------------------- validity

def _check_budget(frame, k, budget):
    calls = len(frame.props) ** k * frame.n
    if budget is not None and calls > budget:
        raise BudgetExceeded(
            f"validity sweep needs {calls} forcing calls, budget is {budget}")


def _proper_states(frame) -> int:
    return frame.full_set & ~1 if frame.extended else frame.full_set


def valid_on_frame(frame: PossibilityFrame, f: Formula, *, budget: int | None = DEFAULT_BUDGET,
                   check: bool = True) -> CheckReport:
    """Validity under every admissible valuation of the variables of f."""
    if check:
        rep = validate_frame(frame)
        if not rep.verdict:
            raise FrameError(f"invalid frame: {rep.condition}")
    prog = Program([f])
    names = [v for v in prog.variables if v != RESERVED_VAR]
    _check_budget(frame, len(names), budget)
    for i in prog.indices:
        if i not in frame.rels:
            raise UnboundSymbol(f"unknown modal index {i!r}")
    ev = Evaluator(frame)
    everything = _proper_states(frame)
    env = {RESERVED_VAR: Model(frame, {}).value(RESERVED_VAR)}
    root = prog.roots[0]
    for choice in itertools.product(frame.props, repeat=len(names)):
        env.update(zip(names, choice))
        t = ev.run(prog, env)[root]
        missing = everything & ~t
        if missing:
            state = (missing & -missing).bit_length() - 1
            val = {nm: members(X) for nm, X in zip(names, choice)}
            return CheckReport.fail("valid", (state,), "countermodel", valuation=val)
    return CheckReport.ok("valid")


def valid_set(frame: PossibilityFrame, formulas: Sequence[Formula], *,
              budget: int | None = DEFAULT_BUDGET) -> list[bool]:
    """Validity of many formulas at once, sharing subformula evaluation."""
    prog = Program(formulas)
    names = [v for v in prog.variables if v != RESERVED_VAR]
    _check_budget(frame, len(names), budget)
    ev = Evaluator(frame)
    everything = _proper_states(frame)
    env = {RESERVED_VAR: Model(frame, {}).value(RESERVED_VAR)}
    alive = list(range(len(formulas)))
    result = [True] * len(formulas)
    for choice in itertools.product(frame.props, repeat=len(names)):
        env.update(zip(names, choice))
        vals = ev.run(prog, env)
        still = []
        for k in alive:
            if everything & ~vals[prog.roots[k]]:
                result[k] = False
            else:
                still.append(k)
        alive = still
        if not alive:
            break
    return result


def satisfiable(frame: PossibilityFrame, f: Formula, *,
                budget: int | None = DEFAULT_BUDGET) -> bool:
    prog = Program([f])
    names = [v for v in prog.variables if v != RESERVED_VAR]
    _check_budget(frame, len(names), budget)
    ev = Evaluator(frame)
    everything = _proper_states(frame)
    env = {RESERVED_VAR: Model(frame, {}).value(RESERVED_VAR)}
    for choice in itertools.product(frame.props, repeat=len(names)):
        env.update(zip(names, choice))
        if ev.run(prog, env)[prog.roots[0]] & everything:
            return True
    return False


# ------------------------------------------------------------------ Kripke

def kripke_forces(frame: PossibilityFrame, valuation: Mapping[str, int], world: int,
                  f: Formula) -> bool:
    """Classical satisfaction; the frame's order is ignored."""
    if isinstance(f, Var):
        if f.name not in valuation:
            if f.name == RESERVED_VAR:
                return False
            raise UnboundSymbol(f"unbound variable {f.name!r}")
        return bool(valuation[f.name] >> world & 1)
    if isinstance(f, Neg):
        return not kripke_forces(frame, valuation, world, f.child)
    if isinstance(f, And):
        return (kripke_forces(frame, valuation, world, f.left)
                and kripke_forces(frame, valuation, world, f.right))
    if isinstance(f, Imp):
        return (not kripke_forces(frame, valuation, world, f.left)
                or kripke_forces(frame, valuation, world, f.right))
    if f.index not in frame.rels:
        raise UnboundSymbol(f"unknown modal index {f.index!r}")
    return all(kripke_forces(frame, valuation, v, f.child)
               for v in bits(frame.rels[f.index][world]))


def kripke_truth_set(frame: PossibilityFrame, valuation: Mapping[str, int], f: Formula) -> int:
    """Classical truth set computed with set operations."""
    full = frame.full_set
    if isinstance(f, Var):
        if f.name not in valuation:
            if f.name == RESERVED_VAR:
                return 0
            raise UnboundSymbol(f"unbound variable {f.name!r}")
        return valuation[f.name]
    if isinstance(f, Neg):
        return full & ~kripke_truth_set(frame, valuation, f.child)
    if isinstance(f, And):
        return kripke_truth_set(frame, valuation, f.left) & kripke_truth_set(frame, valuation, f.right)
    if isinstance(f, Imp):
        return (full & ~kripke_truth_set(frame, valuation, f.left)) | \
            kripke_truth_set(frame, valuation, f.right)
    if f.index not in frame.rels:
        raise UnboundSymbol(f"unknown modal index {f.index!r}")
    X = kripke_truth_set(frame, valuation, f.child)
    succ = frame.rels[f.index]
    return sum(1 << w for w in range(frame.n) if succ[w] & ~X == 0)


def kripke_valid(frame: PossibilityFrame, f: Formula, *,
                 budget: int | None = DEFAULT_BUDGET) -> CheckReport:
    names = [v for v in variables(f) if v != RESERVED_VAR]
    calls = (1 << frame.n) ** len(names) * frame.n
    if budget is not None and calls > budget:
        raise BudgetExceeded(f"validity sweep needs {calls} calls, budget is {budget}")
    for choice in itertools.product(range(frame.full_set + 1), repeat=len(names)):
        val = dict(zip(names, choice))
        t = kripke_truth_set(frame, val, f)
        if t != frame.full_set:
            w = ((frame.full_set & ~t) & -(frame.full_set & ~t)).bit_length() - 1
            return CheckReport.fail("kripke valid", (w,), "countermodel",
                                    valuation={k: members(v) for k, v in val.items()})
    return CheckReport.ok("kripke valid")


# ------------------------------------------------------------ batch sweeps

class FamilyBatch:
    """Truth tables for many frames that share one poset and admissible family.

    Admissible sets are coded by their position in ``props``; each frame
    contributes, per modal index, the table sending a code to the code of
    its box.  Results are numpy arrays of shape (frames, valuations), with
    valuations enumerated as itertools.product(props, repeat=#variables).
    """

    def __init__(self, poset, props: Sequence[int]):
        import numpy as np
        self.np = np
        self.poset = poset
        self.props = tuple(props)
        self.code = {X: k for k, X in enumerate(self.props)}
        k = len(self.props)
        try:
            self.neg = np.array([self.code[poset.pseudo_complement(X)] for X in self.props])
            self.meet = np.array([[self.code[X & Y] for Y in self.props] for X in self.props])
            self.imp = np.array([[self.code[poset.implication(X, Y)] for Y in self.props]
                                 for X in self.props])
        except KeyError:
            raise FrameError("admissible family is not closed under the connectives") from None
        self.top = self.code.get(poset.full)
        self.bottom = self.code.get(0)
        self.size = k

    def box_table(self, frame: PossibilityFrame, index: str):
        try:
            return self.np.array([self.code[frame.box(index, X)] for X in self.props])
        except KeyError:
            raise FrameError("admissible family is not closed under box") from None

    def valuations(self, names: Sequence[str]):
        grid = list(itertools.product(range(self.size), repeat=len(names)))
        arr = self.np.array(grid, dtype=self.np.int64).reshape(len(grid), len(names))
        return {nm: arr[:, j][None, :] for j, nm in enumerate(names)}

    def run(self, prog: Program, box_tables: Mapping[str, object]) -> list:
        """Per root: code array of shape (frames, valuations)."""
        np = self.np
        names = [v for v in prog.variables if v != RESERVED_VAR]
        cols = self.valuations(names)
        frames = None
        for t in box_tables.values():
            frames = t.shape[0]
        vals: list = []
        for nd in prog.nodes:
            op = nd[0]
            if op == "var":
                vals.append(cols[nd[1]] if nd[1] != RESERVED_VAR
                            else np.full((1, 1), self.bottom))
            elif op == "neg":
                vals.append(self.neg[vals[nd[1]]])
            elif op == "and":
                vals.append(self.meet[vals[nd[1]], vals[nd[2]]])
            elif op == "imp":
                vals.append(self.imp[vals[nd[1]], vals[nd[2]]])
            else:
                table = box_tables[nd[1]]
                arg = vals[nd[2]]
                arg = np.broadcast_to(arg, (frames, max(arg.shape[1], 1)))
                vals.append(np.take_along_axis(table, arg, axis=1))
        return [vals[r] for r in prog.roots]


def load_battery(version: int = 1) -> list[Formula]:
    """The fixed depth-≤2 formula battery shipped with the package."""
    from importlib import resources
    from .formula import parse
    text = resources.files("possibility").joinpath(f"data/battery_v{version}.txt").read_text()
    return [parse(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]
