"""First-order frame conditions for Lemmon-Scott axioms and sweep harnesses.

A schema (α, β, δ, γ) stands for ◇_α □_β p → □_δ ◇_γ p.  Over possibility
frames an empty index sequence relates x to every refinement of x; over
Kripke frames it is the identity.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import (And, Formula, Imp, Neg, Var, Dia, boxes, diamonds, variables)
from .forcing import DEFAULT_BUDGET, kripke_valid, valid_on_frame
from .frame import CheckReport, PossibilityFrame, bits, image

KINDS = ("possibility", "kripke")


@dataclass(frozen=True)
class LSSchema:
    alpha: tuple[str, ...] = ()
    beta: tuple[str, ...] = ()
    delta: tuple[str, ...] = ()
    gamma: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("alpha", "beta", "delta", "gamma"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def indices(self) -> list[str]:
        return sorted(set(self.alpha + self.beta + self.delta + self.gamma))

    def to_text(self) -> str:
        return ";".join(",".join(s) if s else "e" for s in
                        (self.alpha, self.beta, self.delta, self.gamma))


class SchemaError(ValueError):
    pass


def parse_schema(text: str) -> LSSchema:
    """Parse "alpha;beta;delta;gamma"; `e` is empty, commas split a sequence.

    `|` is accepted as a field separator alongside `;`.
    """
    fields = text.replace("|", ";").split(";")
    if len(fields) != 4:
        raise SchemaError(f"schema needs 4 fields separated by ';', got {len(fields)}")
    seqs = []
    for k, fld in enumerate(fields):
        fld = fld.strip()
        if fld in ("e", ""):
            seqs.append(())
            continue
        items = tuple(s.strip() for s in fld.split(","))
        if any(not s or not (s.isalnum() or s.replace("_", "").isalnum()) for s in items):
            raise SchemaError(f"bad index list in field {k + 1}: {fld!r}")
        seqs.append(items)
    return LSSchema(*seqs)


def ls_axiom(schema: LSSchema, var: str = "p1") -> Formula:
    p = Var(var)
    return Imp(diamonds(schema.alpha, boxes(schema.beta, p)),
               boxes(schema.delta, diamonds(schema.gamma, p)))


# ------------------------------------------------------------ path relations

def _identity(n: int) -> tuple[int, ...]:
    return tuple(1 << x for x in range(n))


def path_relation(frame: PossibilityFrame, seq: Sequence[str], kind: str = "possibility"
                  ) -> tuple[int, ...]:
    """R_σ as successor bitsets; relational composition along σ."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    seq = tuple(seq)
    if not seq:
        return tuple(frame.poset.down) if kind == "possibility" else _identity(frame.n)
    rel = frame.relation(seq[0])
    for i in seq[1:]:
        step = frame.relation(i)
        rel = tuple(image(step, row) for row in rel)
    return rel


# ------------------------------------------------------------- conditions

@dataclass
class _Tables:
    delta: tuple
    alpha: tuple
    beta: tuple
    gamma: tuple
    empty_alpha: bool


def _tables(frame, schema, kind) -> _Tables:
    return _Tables(path_relation(frame, schema.delta, kind),
                   path_relation(frame, schema.alpha, kind),
                   path_relation(frame, schema.beta, kind),
                   path_relation(frame, schema.gamma, kind),
                   not schema.alpha)


def _local_failure(frame, t: _Tables, kind: str, x: int):
    """Witness tuple where the condition fails at x, or None."""
    down = frame.poset.down
    for y in bits(t.delta[x]):
        goal = t.gamma[y]
        if kind == "kripke":
            for z in bits(t.alpha[x]):
                if not goal & t.beta[z]:
                    return (x, y, z)
        elif t.empty_alpha:
            if not goal & t.beta[x]:
                return (x, y)
        else:
            if not any(all(goal & t.beta[z] for z in bits(t.alpha[x1])) for x1 in bits(down[x])):
                return (x, y)
    return None


def local_ls_condition(frame: PossibilityFrame, schema: LSSchema, x: int,
                       kind: str = "possibility") -> CheckReport:
    """The condition with its outer ∀x fixed at state x."""
    w = _local_failure(frame, _tables(frame, schema, kind), kind, x)
    if w is not None:
        return CheckReport.fail("local LS condition", w)
    return CheckReport.ok("local LS condition")


def ls_condition(frame: PossibilityFrame, schema: LSSchema, kind: str = "possibility",
                 under: Sequence[str] = ()) -> CheckReport:
    """Frame condition; with `under`, the condition is required at every R_under-successor.

    The `under` form is the correspondent of □_under(axiom) built from local
    correspondents.
    """
    t = _tables(frame, schema, kind)
    if under:
        starts = path_relation(frame, under, kind)
        seen = 0
        for x in range(frame.n):
            for y in bits(starts[x] & ~seen):
                w = _local_failure(frame, t, kind, y)
                if w is not None:
                    return CheckReport.fail("LS condition", (x,) + w)
                seen |= 1 << y
        return CheckReport.ok("LS condition")
    for x in range(frame.n):
        w = _local_failure(frame, t, kind, x)
        if w is not None:
            return CheckReport.fail("LS condition", w)
    return CheckReport.ok("LS condition")


# ------------------------------------------------------ named correspondents

@dataclass(frozen=True)
class Correspondent:
    name: str
    schema: LSSchema
    under: tuple[str, ...] = ()

    def axiom(self, var: str = "p1") -> Formula:
        return boxes(self.under, ls_axiom(self.schema, var))

    def condition(self, frame: PossibilityFrame, kind: str = "possibility") -> CheckReport:
        return ls_condition(frame, self.schema, kind, self.under)


FAMILIAR = {
    "D": Correspondent("D", LSSchema((), ("i",), (), ("i",))),
    "T": Correspondent("T", LSSchema((), ("i",), (), ())),
    "4": Correspondent("4", LSSchema((), ("i",), ("i", "i"), ())),
    "B": Correspondent("B", LSSchema((), (), ("i",), ("i",))),
    "5": Correspondent("5", LSSchema(("i",), (), ("i",), ("i",))),
    "inclusion": Correspondent("inclusion", LSSchema((), ("i",), ("j",), ())),
    "shift-reflexivity": Correspondent("shift-reflexivity", LSSchema((), ("i",), (), ()), ("i",)),
}


def strong_simplification(frame: PossibilityFrame, name: str) -> bool:
    """The simpler first-order forms the familiar conditions take on strong frames."""
    R = frame.relation("i")
    n = frame.n
    down = frame.poset.down
    if name == "T":
        return all(R[x] >> x & 1 for x in range(n))
    if name == "T-dense":
        return all(R[x] & down[x] for x in range(n))
    if name == "4":
        return all(image(R, R[x]) & ~R[x] == 0 for x in range(n))
    if name == "D":
        return all(R[x] for x in range(n))
    if name == "inclusion":
        Rj = frame.relation("j")
        return all(Rj[x] & ~R[x] == 0 for x in range(n))
    if name == "shift-reflexivity":
        return all(R[y] >> y & 1 for x in range(n) for y in bits(R[x]))
    raise KeyError(name)


# ------------------------------------------------------------------ sweeps

def _frame_json(frame: PossibilityFrame) -> str:
    from .cli import frame_to_document
    return json.dumps(frame_to_document(frame), sort_keys=True)


@dataclass
class SweepReport:
    verdict: bool
    checked: int = 0
    agreeing_true: int = 0
    divergences: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict


def verify_correspondence(target, frames: Iterable[PossibilityFrame], kind: str = "possibility",
                          *, direction: str = "both", budget: int | None = DEFAULT_BUDGET,
                          stop_at: int = 1) -> SweepReport:
    """Compare axiom validity with the first-order condition on every frame.

    direction "both" checks the biconditional; "validity-if" only checks
    condition ⟹ validity.
    """
    corr = target if isinstance(target, Correspondent) else Correspondent("schema", target)
    ax = corr.axiom()
    rep = SweepReport(True)
    for frame in frames:
        rep.checked += 1
        cond = corr.condition(frame, kind).verdict
        if kind == "kripke":
            valid = kripke_valid(frame, ax, budget=budget).verdict
        else:
            valid = valid_on_frame(frame, ax, budget=budget, check=False).verdict
        bad = (cond != valid) if direction == "both" else (cond and not valid)
        if bad:
            rep.verdict = False
            rep.divergences.append({"frame": _frame_json(frame), "condition": cond,
                                    "valid": valid})
            if len(rep.divergences) >= stop_at:
                break
        elif cond and valid:
            rep.agreeing_true += 1
    return rep


# ---------------------------------------------------- standard translation

def _predicate(name: str) -> str:
    if name.startswith("p") and name[1:].isdigit():
        return "Q" + name[1:]
    return "Q_" + name


def standard_translation(f: Formula, var: str = "x") -> str:
    """First-order text for ST_var(f); bound variables are fresh."""
    pool = (f"{c}{k}" if k else c for k in itertools.count() for c in "yzuvw")
    used = {var}

    def fresh():
        for v in pool:
            if v not in used:
                used.add(v)
                return v

    def st(g: Formula, x: str) -> str:
        if isinstance(g, Var):
            return f"{_predicate(g.name)}({x})"
        if isinstance(g, Neg):
            y = fresh()
            return f"∀{y}({y}⊑{x} → ¬{st(g.child, y)})"
        if isinstance(g, And):
            return f"({st(g.left, x)} ∧ {st(g.right, x)})"
        if isinstance(g, Imp):
            y = fresh()
            return f"∀{y}(({y}⊑{x} ∧ {st(g.left, y)}) → {st(g.right, y)})"
        y = fresh()
        return f"∀{y}({x}R{g.index} {y} → {st(g.child, y)})"

    return st(f, var)


# ------------------------------------------------------------------- split

class SplitError(ValueError):
    pass


def split_axiom(phi: Formula, psi: Formula, index: str = "i", var: str = "p1") -> Formula:
    """◇(p ∧ ψ) → (◇(p ∧ φ) ∧ ◇(p ∧ ¬φ))."""
    if var in variables(psi):
        raise SplitError(f"ψ must not contain {var}")
    p = Var(var)
    return Imp(Dia(index, And(p, psi)),
               And(Dia(index, And(p, phi)), Dia(index, And(p, Neg(phi)))))


def kripke_split_property(frame: PossibilityFrame, phi: Formula, psi: Formula,
                          index: str = "i", *, budget: int | None = DEFAULT_BUDGET) -> CheckReport:
    """On a Kripke frame: Split valid ⟹ ¬◇ψ valid."""
    split = kripke_valid(frame, split_axiom(phi, psi, index), budget=budget)
    neg = kripke_valid(frame, Neg(Dia(index, psi)), budget=budget)
    if split.verdict and not neg.verdict:
        return CheckReport.fail("split property", neg.witness, "Split valid but ¬◇ψ refuted",
                                valuation=neg.data.get("valuation"))
    return CheckReport.ok("split property", split_valid=split.verdict, neg_valid=neg.verdict)
