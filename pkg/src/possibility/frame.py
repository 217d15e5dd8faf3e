"""Finite posets, possibility frames, regular open sets, and the frame-class
and interplay-condition predicates.

State sets are Python ints used as bitsets: bit ``x`` is set when state
``x`` belongs to the set.  A relation is a tuple of successor bitsets, one
per state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence


# ------------------------------------------------------------------ bitsets

def bits(mask: int) -> Iterator[int]:
    """Iterate the members of a bitset in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def to_mask(states: Iterable[int]) -> int:
    m = 0
    for s in states:
        m |= 1 << s
    return m


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def relation_from_pairs(n: int, pairs: Iterable[Sequence[int]]) -> tuple[int, ...]:
    succ = [0] * n
    for x, y in pairs:
        if not (0 <= x < n and 0 <= y < n):
            raise ValueError(f"relation pair ({x}, {y}) out of range for {n} states")
        succ[x] |= 1 << y
    return tuple(succ)


def relation_pairs(succ: Sequence[int]) -> list[tuple[int, int]]:
    return [(x, y) for x, row in enumerate(succ) for y in bits(row)]


def converse(succ: Sequence[int]) -> tuple[int, ...]:
    pred = [0] * len(succ)
    for x, row in enumerate(succ):
        for y in bits(row):
            pred[y] |= 1 << x
    return tuple(pred)


def image(succ: Sequence[int], X: int) -> int:
    out = 0
    for x in bits(X):
        out |= succ[x]
    return out


# ------------------------------------------------------------------- posets

class PosetError(ValueError):
    pass


class FinitePoset:
    """A partial order on ``range(n)``; ``x ⊑ y`` reads "x refines y".

    ``down[x]`` is the bitset of refinements of x, ``up[x]`` the bitset of
    states that x refines.
    """

    def __init__(self, n: int, leq_pairs: Iterable[Sequence[int]] = (), *,
                 down: Sequence[int] | None = None):
        if n < 1:
            raise PosetError("a poset needs at least one state")
        self.n = n
        self.full = (1 << n) - 1
        if down is None:
            d = [1 << x for x in range(n)]
            for x, y in leq_pairs:
                if not (0 <= x < n and 0 <= y < n):
                    raise PosetError(f"order pair ({x}, {y}) out of range")
                d[y] |= 1 << x
            down = d
        self.down = tuple(down)
        if len(self.down) != n:
            raise PosetError("down table has the wrong length")
        self._check()
        up = [0] * n
        for y in range(n):
            for x in bits(self.down[y]):
                up[x] |= 1 << y
        self.up = tuple(up)

    def _check(self):
        d = self.down
        for x in range(self.n):
            if not d[x] >> x & 1:
                raise PosetError(f"order is not reflexive at {x}")
            if d[x] >> self.n:
                raise PosetError(f"state out of range below {x}")
        for y in range(self.n):
            for x in bits(d[y]):
                if x != y and d[x] >> y & 1:
                    raise PosetError(f"order is not antisymmetric: {x} and {y}")
                if d[x] & ~d[y]:
                    z = lowest(d[x] & ~d[y])
                    raise PosetError(f"order is not transitive: {z} ⊑ {x} ⊑ {y}")

    @classmethod
    def discrete(cls, n: int) -> "FinitePoset":
        return cls(n, down=[1 << x for x in range(n)])

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        """State 0 is the bottom, n-1 the top."""
        return cls(n, down=[(1 << (x + 1)) - 1 for x in range(n)])

    def leq(self, x: int, y: int) -> bool:
        return bool(self.down[y] >> x & 1)

    def pairs(self, strict: bool = False) -> list[tuple[int, int]]:
        return [(x, y) for y in range(self.n) for x in bits(self.down[y])
                if not (strict and x == y)]

    def covers(self) -> list[tuple[int, int]]:
        """Pairs (x, y) with x ⊑ y, x ≠ y and nothing strictly between."""
        out = []
        for y in range(self.n):
            below = self.down[y] & ~(1 << y)
            for x in bits(below):
                mid = below & self.up[x] & ~(1 << x)
                if not mid:
                    out.append((x, y))
        return sorted(out)

    def __eq__(self, other):
        return isinstance(other, FinitePoset) and self.down == other.down

    def __hash__(self):
        return hash(self.down)

    def __repr__(self):
        return f"FinitePoset({self.n}, {self.pairs(strict=True)})"

    def _check_set(self, X: int):
        if X < 0 or X >> self.n:
            raise ValueError(f"state set {X:#x} has states out of range")

    # derived tables
    @cached_property
    def comp(self) -> tuple[int, ...]:
        """comp[y]: states compatible with y (sharing a common refinement)."""
        return tuple(self.up_set(self.down[y]) for y in range(self.n))

    @cached_property
    def minimal(self) -> int:
        return to_mask(x for x in range(self.n) if self.down[x] == 1 << x)

    @cached_property
    def regular_opens(self) -> tuple[int, ...]:
        return tuple(X for X in range(self.full + 1) if self.is_regular_open(X))

    @cached_property
    def ro_members(self) -> frozenset:
        return frozenset(self.regular_opens)

    # topology on downsets
    def interior(self, X: int) -> int:
        self._check_set(X)
        out = 0
        for y in range(self.n):
            if self.down[y] & ~X == 0:
                out |= 1 << y
        return out

    def closure(self, X: int) -> int:
        self._check_set(X)
        out = 0
        for y in range(self.n):
            if self.down[y] & X:
                out |= 1 << y
        return out

    def down_set(self, X: int) -> int:
        out = 0
        for x in bits(X):
            out |= self.down[x]
        return out

    def up_set(self, X: int) -> int:
        out = 0
        for x in bits(X):
            out |= self.up[x]
        return out

    def ro_hull(self, X: int) -> int:
        return self.interior(self.closure(self.down_set(X)))

    def is_persistent(self, X: int) -> bool:
        return all(self.down[x] & ~X == 0 for x in bits(X))

    def is_regular_open(self, X: int) -> bool:
        # persistence plus refinability: X = int(cl(X)) in the downset topology
        return self.interior(self.closure(X)) == X

    def pseudo_complement(self, X: int) -> int:
        """The RO complement int(S∖X)."""
        return self.interior(self.full & ~X)

    def implication(self, X: int, Y: int) -> int:
        """X ⊃ Y = {s | every refinement of s in X is in Y}."""
        return self.interior((self.full & ~X) | Y)

    def s_refines(self, x: int, y: int) -> bool:
        """x ⊑s y: every refinement of x is compatible with y."""
        return self.down[x] & ~self.comp[y] == 0


# ------------------------------------------------------------------ frames

FULL = "full"


class FrameError(ValueError):
    pass


class PossibilityFrame:
    """A finite possibility frame ⟨S, ⊑, {R_i}, P⟩.

    ``rels`` maps each modal index to a tuple of successor bitsets.
    ``props`` is a family of state sets, or the marker ``"full"`` for P = RO.
    An extended frame has its impossible state ⊥ at index 0.
    """

    def __init__(self, poset: FinitePoset,
                 rels: Mapping[str, Sequence[int]] | None = None,
                 props: Iterable[int] | str = FULL, *, extended: bool = False,
                 labels: Sequence | None = None):
        self.poset = poset
        # optional names for the states, e.g. the algebra element a state stands for
        self.labels = None if labels is None else tuple(labels)
        self.n = poset.n
        rels = dict(rels or {})
        self.rels: dict[str, tuple[int, ...]] = {}
        for i in sorted(rels):
            succ = tuple(rels[i])
            if len(succ) != self.n or any(r < 0 or r >> self.n for r in succ):
                raise FrameError(f"relation {i!r} does not fit {self.n} states")
            self.rels[i] = succ
        self.is_full_marker = props == FULL
        if self.is_full_marker:
            if extended:
                raise FrameError("an extended frame needs an explicit admissible family")
            fam = poset.regular_opens
        else:
            fam = sorted(set(props))
            for X in fam:
                if X < 0 or X >> self.n:
                    raise FrameError(f"admissible set {X:#x} has states out of range")
        self.props: tuple[int, ...] = tuple(fam)
        self.prop_set = frozenset(self.props)
        self.extended = extended

    @property
    def indices(self) -> list[str]:
        return list(self.rels)

    @property
    def full_set(self) -> int:
        return self.poset.full

    def relation(self, index: str) -> tuple[int, ...]:
        try:
            return self.rels[index]
        except KeyError:
            raise KeyError(f"unknown modal index {index!r}") from None

    def key(self):
        return (self.poset.down, tuple(self.rels.items()), self.props, self.extended)

    def __eq__(self, other):
        return isinstance(other, PossibilityFrame) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rels = {i: relation_pairs(r) for i, r in self.rels.items()}
        return (f"PossibilityFrame(n={self.n}, leq={self.poset.pairs(strict=True)}, "
                f"rels={rels}, props={[members(X) for X in self.props]})")

    def with_relations(self, rels, props=None) -> "PossibilityFrame":
        return PossibilityFrame(self.poset, rels, self.props if props is None else props,
                                extended=self.extended, labels=self.labels)

    # operations on state sets
    def box(self, index: str, X: int) -> int:
        succ = self.relation(index)
        out = 0
        for x in range(self.n):
            if succ[x] & ~X == 0:
                out |= 1 << x
        return out

    def neg(self, X: int) -> int:
        if self.extended:
            # refinements other than ⊥ avoid X
            out = 0
            for x in range(self.n):
                if self.poset.down[x] & X & ~1 == 0:
                    out |= 1 << x
            return out
        return self.poset.pseudo_complement(X)

    def implication(self, X: int, Y: int) -> int:
        return self.poset.implication(X, Y)


def box_op(frame: PossibilityFrame, index: str, X: int) -> int:
    frame.poset._check_set(X)
    return frame.box(index, X)


def diamond_op(frame: PossibilityFrame, index: str, X: int) -> int:
    """♦X = {x | ∀x'⊑x ∃y': x'Ry' and some refinement of y' is in X}."""
    frame.poset._check_set(X)
    succ = frame.relation(index)
    p = frame.poset
    reach = p.up_set(X)  # states with a refinement in X
    seeing = to_mask(x for x in range(p.n) if succ[x] & reach)
    return p.interior(seeing)


def interior(poset: FinitePoset, X: int) -> int:
    return poset.interior(X)


def closure(poset: FinitePoset, X: int) -> int:
    return poset.closure(X)


def down_set(poset: FinitePoset, X: int) -> int:
    poset._check_set(X)
    return poset.down_set(X)


def ro_hull(poset: FinitePoset, X: int) -> int:
    poset._check_set(X)
    return poset.ro_hull(X)


def regular_opens(poset: FinitePoset) -> tuple[int, ...]:
    return poset.regular_opens


def s_refines(frame: PossibilityFrame | FinitePoset, x: int, y: int) -> bool:
    p = frame.poset if isinstance(frame, PossibilityFrame) else frame
    if not (0 <= x < p.n and 0 <= y < p.n):
        raise ValueError("state out of range")
    return p.s_refines(x, y)


def kripke_frame(n: int, rels: Mapping[str, Iterable[Sequence[int]]]) -> PossibilityFrame:
    """A Kripke frame as a possibility frame: discrete order, every set admissible."""
    rel = {i: relation_from_pairs(n, pairs) for i, pairs in rels.items()}
    return PossibilityFrame(FinitePoset.discrete(n), rel, FULL)


def world_frame(n: int, rels: Mapping[str, Iterable[Sequence[int]]],
                algebra: Iterable[int] | str = FULL) -> PossibilityFrame:
    rel = {i: relation_from_pairs(n, pairs) for i, pairs in rels.items()}
    return PossibilityFrame(FinitePoset.discrete(n), rel, algebra)


# ------------------------------------------------------------- reporting

@dataclass
class CheckReport:
    verdict: bool
    condition: str
    witness: tuple | None = None
    detail: str = ""
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return self.verdict

    @classmethod
    def ok(cls, condition: str, **data) -> "CheckReport":
        return cls(True, condition, None, "", data)

    @classmethod
    def fail(cls, condition: str, witness: tuple, detail: str = "", **data) -> "CheckReport":
        return cls(False, condition, tuple(witness), detail, data)


# ---------------------------------------------------- interplay conditions
#
# Each checker takes the poset and a successor table and returns the
# lexicographically least violating tuple, or None.  Tuple layouts:
#   (x', x, y', z)  R-rule
#   (x', x, y')     R-com, up-R, R-common
#   (x, y, y')      R-down, R⇒win, R⇒win-underline
#   (x, y)          R⇔win-underline, R-refinability(+/++), R-dense
#   (x,)            R-max, R-maxe, R-princ

def _rule_cover(p: FinitePoset, succ) -> list[int]:
    comp = p.comp
    out = []
    for row in succ:
        c = 0
        for y in bits(row):
            c |= comp[y]
        out.append(c)
    return out


def _v_rule(p, succ):
    cover = _rule_cover(p, succ)
    comp = p.comp
    for x1 in range(p.n):
        for x in bits(p.up[x1]):
            if cover[x1] & ~cover[x] == 0:
                continue
            for y1 in bits(succ[x1]):
                bad = comp[y1] & ~cover[x]
                if bad:
                    return (x1, x, y1, lowest(bad))
    return None


def _v_com(p, succ):
    for x1 in range(p.n):
        for x in bits(p.up[x1]):
            bad = succ[x1] & ~p.down_set(succ[x])
            if bad:
                return (x1, x, lowest(bad))
    return None


def _v_up(p, succ):
    for x1 in range(p.n):
        for x in bits(p.up[x1]):
            bad = succ[x1] & ~succ[x]
            if bad:
                return (x1, x, lowest(bad))
    return None


def _v_down(p, succ):
    for x in range(p.n):
        for y in bits(succ[x]):
            bad = p.down[y] & ~succ[x]
            if bad:
                return (x, y, lowest(bad))
    return None


def _win_sets(p, succ, targets) -> list[int]:
    """For each y', the states x with ∃x'⊑x ∀x''⊑x': R(x'') meets targets[y']."""
    n = p.n
    out = []
    for t in targets:
        w = 0
        for x in range(n):
            if succ[x] & t:
                w |= 1 << x
        out.append(p.closure(p.interior(w)))
    return out


def _v_win(p, succ, targets):
    good = _win_sets(p, succ, targets)
    for x in range(p.n):
        for y in bits(succ[x]):
            for y1 in bits(p.down[y]):
                if not good[y1] >> x & 1:
                    return (x, y, y1)
    return None


def _v_win_compat(p, succ):
    return _v_win(p, succ, p.comp)


def _v_win_under(p, succ):
    return _v_win(p, succ, p.down)


def _v_win_iff(p, succ):
    good = _win_sets(p, succ, p.down)
    for x in range(p.n):
        for y in range(p.n):
            won = all(good[y1] >> x & 1 for y1 in bits(p.down[y]))
            if won != bool(succ[x] >> y & 1):
                return (x, y)
    return None


def _v_refinability(p, succ):
    good = _win_sets(p, succ, p.down)
    for x in range(p.n):
        for y in bits(succ[x]):
            if not good[y] >> x & 1:
                return (x, y)
    return None


def _v_refinability_plus(p, succ):
    pred = converse(succ)
    good = [p.closure(p.interior(pred[y])) for y in range(p.n)]
    for x in range(p.n):
        for y in bits(succ[x]):
            if not any(good[y1] >> x & 1 for y1 in bits(p.down[y])):
                return (x, y)
    return None


def _v_refinability_pp(p, succ):
    pred = converse(succ)
    for x in range(p.n):
        for y in bits(succ[x]):
            if not p.closure(p.interior(pred[y])) >> x & 1:
                return (x, y)
    return None


def _v_dense(p, succ):
    for x in range(p.n):
        row = succ[x]
        for y in range(p.n):
            if row >> y & 1:
                continue
            if all(p.down[y1] & row for y1 in bits(p.down[y])):
                return (x, y)
    return None


def _has_max(p, row) -> bool:
    return any(row & ~p.down[m] == 0 for m in bits(row))


def _v_max(p, succ):
    for x in range(p.n):
        if succ[x] and not _has_max(p, succ[x]):
            return (x,)
    return None


def _v_maxe(p, succ):
    for x in range(p.n):
        if not _has_max(p, succ[x]):
            return (x,)
    return None


def _v_princ(p, succ):
    for x in range(p.n):
        row = succ[x]
        if row and not any(p.down[m] == row for m in bits(row)):
            return (x,)
    return None


def _v_common(p, succ):
    for x1 in range(p.n):
        for x in bits(p.up[x1]):
            both = succ[x1] & succ[x]
            for y1 in bits(succ[x1]):
                if p.down[y1] & both == 0:
                    return (x1, x, y1)
    return None


CONDITIONS = {
    "R-rule": _v_rule,
    "R-com": _v_com,
    "up-R": _v_up,
    "R-down": _v_down,
    "R⇒win": _v_win_compat,
    "R⇒win-underline": _v_win_under,
    "R⇔win-underline": _v_win_iff,
    "R-refinability": _v_refinability,
    "R-refinability+": _v_refinability_plus,
    "R-refinability++": _v_refinability_pp,
    "R-dense": _v_dense,
    "R-max": _v_max,
    "R-maxe": _v_maxe,
    "R-princ": _v_princ,
    "R-common": _v_common,
}

_ALIASES = {
    "R=>win": "R⇒win",
    "R=>win-underline": "R⇒win-underline",
    "R<=>win-underline": "R⇔win-underline",
}


def condition_name(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in CONDITIONS:
        raise KeyError(f"unknown interplay condition {name!r}")
    return name


def violation(poset: FinitePoset, succ: Sequence[int], condition: str):
    """Least violating tuple of a condition for a bare relation, or None."""
    return CONDITIONS[condition_name(condition)](poset, succ)


def check_interplay(frame: PossibilityFrame, index: str, condition: str) -> CheckReport:
    name = condition_name(condition)
    w = CONDITIONS[name](frame.poset, frame.relation(index))
    if w is None:
        return CheckReport.ok(name)
    return CheckReport.fail(name, w, f"index {index}")


# ------------------------------------------------------------- validation

def ro_closed_under_box(poset: FinitePoset, succ: Sequence[int]) -> bool:
    ro = poset.ro_members
    n = poset.n
    for X in poset.regular_opens:
        b = 0
        for x in range(n):
            if succ[x] & ~X == 0:
                b |= 1 << x
        if b not in ro:
            return False
    return True


def _validate_extended(frame: PossibilityFrame) -> CheckReport:
    p = frame.poset
    if p.up[0] != p.full:
        return CheckReport.fail("extended: ⊥ is the minimum", (0,))
    for i, succ in frame.rels.items():
        if succ[0] != 1:
            return CheckReport.fail(f"extended: R_{i}(⊥) = {{⊥}}", (0,))
        for x in range(frame.n):
            if not succ[x] & 1:
                return CheckReport.fail(f"extended: x R_{i} ⊥", (x,))
    for X in frame.props:
        if not X & 1:
            return CheckReport.fail("extended: ⊥ in every admissible set", (X,))
    return validate_frame(restrict_to_proper(frame))


def restrict_to_proper(frame: PossibilityFrame) -> PossibilityFrame:
    """Drop state 0 (the impossible state) of an extended frame."""
    n = frame.n
    down = [frame.poset.down[x] >> 1 for x in range(1, n)]
    rels = {i: tuple(s[x] >> 1 for x in range(1, n)) for i, s in frame.rels.items()}
    props = {X >> 1 for X in frame.props}
    return PossibilityFrame(FinitePoset(n - 1, down=down), rels, props)


def validate_frame(frame: PossibilityFrame) -> CheckReport:
    """First violated clause in the order: poset, ∅∈P, ∩, ⊃, ■ per index, RO."""
    if frame.extended:
        return _validate_extended(frame)
    try:
        FinitePoset(frame.n, down=frame.poset.down)
    except PosetError as e:
        return CheckReport.fail("poset", (), str(e))
    P = frame.props
    Pset = frame.prop_set
    if 0 not in Pset:
        return CheckReport.fail("empty set admissible", (0,))
    for a in P:
        for b in P:
            if b < a:
                continue
            if a & b not in Pset:
                return CheckReport.fail("closed under ∩", (a, b), "intersection not admissible")
    for a in P:
        for b in P:
            if frame.implication(a, b) not in Pset:
                return CheckReport.fail("closed under ⊃", (a, b), "implication not admissible")
    for i in frame.indices:
        for a in P:
            if frame.box(i, a) not in Pset:
                return CheckReport.fail(f"closed under ■{i}", (a,),
                                        f"box of {members(a)} is {members(frame.box(i, a))}")
    for a in P:
        if not frame.poset.is_regular_open(a):
            return CheckReport.fail("admissible sets are regular open", (a,))
    return CheckReport.ok("possibility frame")


# ----------------------------------------------------------- classification

def _meet_of_containing(frame: PossibilityFrame, X: int) -> int:
    """⋂{Z∈P | X ⊆ Z}."""
    out = frame.full_set
    for Z in frame.props:
        if X & ~Z == 0:
            out &= Z
    return out


def tight_relation(frame: PossibilityFrame, index: str) -> tuple[int, ...]:
    """xR□y iff y lies in every admissible Z with x ∈ ■Z."""
    succ = frame.relation(index)
    return tuple(_meet_of_containing(frame, succ[x]) for x in range(frame.n))


def p_indistinguishable_below(frame: PossibilityFrame) -> tuple[int, ...]:
    """For each x, the states y with: every admissible set containing x contains y."""
    return tuple(_meet_of_containing(frame, 1 << x) for x in range(frame.n))


def is_boolean_lattice_minus_bottom(p: FinitePoset) -> bool:
    """S with a bottom added is isomorphic to the powerset of the minimal points."""
    atoms = p.minimal
    k = bin(atoms).count("1")
    if p.n != (1 << k) - 1:
        return False
    seen = set()
    for x in range(p.n):
        a = p.down[x] & atoms
        if a in seen:
            return False
        seen.add(a)
    for x in range(p.n):
        for y in range(p.n):
            ax, ay = p.down[x] & atoms, p.down[y] & atoms
            if p.leq(x, y) != (ax & ~ay == 0):
                return False
    return True


def principal_family(p: FinitePoset) -> frozenset:
    return frozenset(p.down) | {0}


def proper_filter_generators(frame: PossibilityFrame) -> list[int]:
    """Proper filters of the finite algebra ⟨P,⊆⟩ are ↑a for nonempty a ∈ P."""
    return [a for a in frame.props if a]


CLASS_FLAGS = ("full", "standard", "strong", "separative", "leq_tight", "r_tight",
               "tight", "differentiated", "atomic", "principal", "lattice_complete",
               "rich", "quasi_functional", "functional", "filter_descriptive")


def classify(frame: PossibilityFrame) -> dict[str, bool]:
    rep = validate_frame(frame)
    if not rep.verdict:
        raise FrameError(f"invalid frame: {rep.condition} {rep.detail}")
    p = frame.poset
    n = p.n
    idx = frame.indices
    flags = {}
    flags["full"] = frame.prop_set == p.ro_members
    flags["standard"] = all(_v_down(p, frame.rels[i]) is None for i in idx)
    flags["strong"] = all(_v_win_iff(p, frame.rels[i]) is None for i in idx)
    flags["separative"] = all(
        p.s_refines(x, y) == p.leq(x, y) for x in range(n) for y in range(n))
    ind = p_indistinguishable_below(frame)
    flags["leq_tight"] = all(ind[x] & ~p.down[x] == 0 for x in range(n))
    flags["r_tight"] = all(tight_relation(frame, i) == frame.rels[i] for i in idx)
    flags["tight"] = flags["leq_tight"] and flags["r_tight"]
    sig = [tuple(Z >> x & 1 for Z in frame.props) for x in range(n)]
    flags["differentiated"] = len(set(sig)) == n
    flags["atomic"] = all(p.down[x] & p.minimal for x in range(n))
    flags["principal"] = frame.prop_set == principal_family(p)
    flags["lattice_complete"] = flags["principal"] and is_boolean_lattice_minus_bottom(p)
    flags["rich"] = flags["lattice_complete"] and flags["strong"]
    flags["quasi_functional"] = all(_v_max(p, frame.rels[i]) is None for i in idx)
    flags["functional"] = all(bin(r).count("1") <= 1 for i in idx for r in frame.rels[i])
    fd = flags["tight"]
    if fd:
        for a in proper_filter_generators(frame):
            target = frozenset(Z for Z in frame.props if a & ~Z == 0)
            if not any(frozenset(Z for Z in frame.props if Z >> x & 1) == target
                       for x in range(n)):
                fd = False
                break
    flags["filter_descriptive"] = fd
    return flags
