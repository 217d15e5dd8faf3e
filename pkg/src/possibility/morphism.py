"""Possibility morphisms between finite frames: clause checking, search,
composition and isomorphism testing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .frame import CheckReport, PossibilityFrame, bits, members, to_mask

GRADES = ("possibility", "strict", "p")
FLAGS = ("dense", "robust", "strong_embedding", "leq_strong_embedding", "isomorphism")

GRADE_CLAUSES = {
    "possibility": ("⊑-matching", "R-matching", "pull back"),
    "strict": ("⊑-forth", "⊑-back", "R-forth", "R-back", "pull back"),
    "p": ("⊑-forth", "p-⊑-back", "R-forth", "p-R-back", "pull back"),
}

FLAG_CLAUSES = {
    "dense": ("dense",),
    "robust": ("robust",),
    "strong_embedding": ("⊑ iff", "R iff", "image traces"),
    "leq_strong_embedding": ("⊑ iff", "image traces"),
    "isomorphism": ("bijective", "⊑ iff", "R iff", "pull back", "image admissible"),
}

DEFAULT_NODE_LIMIT = 2_000_000


class SearchBudgetExceeded(RuntimeError):
    pass


class FrameMismatch(ValueError):
    pass


@dataclass(frozen=True)
class MorphismSpec:
    source: PossibilityFrame
    target: PossibilityFrame
    mapping: tuple[int, ...]
    grade: str = "possibility"
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        object.__setattr__(self, "flags", frozenset(self.flags))
        if self.grade not in GRADES:
            raise ValueError(f"unknown grade {self.grade!r}")
        bad = self.flags - set(FLAGS)
        if bad:
            raise ValueError(f"unknown flags {sorted(bad)}")
        if len(self.mapping) != self.source.n:
            raise ValueError("map is not total on the source states")
        if any(not 0 <= y < self.target.n for y in self.mapping):
            raise ValueError("map value out of range of the target states")

    def clauses(self) -> list[str]:
        out = list(GRADE_CLAUSES[self.grade])
        for fl in FLAGS:
            if fl in self.flags:
                out.extend(c for c in FLAG_CLAUSES[fl] if c not in out)
        return out


def push(h: Sequence[int], X: int) -> int:
    return to_mask(h[x] for x in bits(X))


def pull(h: Sequence[int], Y: int) -> int:
    return to_mask(x for x, y in enumerate(h) if Y >> y & 1)


# --------------------------------------------------------------- clauses
#
# Each clause returns None or a witness tuple.  Sets in witnesses are
# rendered as sorted state tuples.

def _leq_matching(F, G, h, states=None):
    pulls = {Y: pull(h, Y) for Y in G.props}
    for x in (range(F.n) if states is None else states):
        for Y in G.props:
            a = G.poset.down[h[x]] & Y == 0
            b = F.poset.down[x] & pulls[Y] == 0
            if a != b:
                return (x, members(Y))
    return None


def _r_matching(F, G, h, states=None):
    pulls = {Y: pull(h, Y) for Y in G.props}
    for i in F.indices:
        R, R2 = F.rels[i], G.rels[i]
        for x in (range(F.n) if states is None else states):
            for Y in G.props:
                if (R2[h[x]] & ~Y == 0) != (R[x] & ~pulls[Y] == 0):
                    return (i, x, members(Y))
    return None


def _pull_back(F, G, h):
    for Y in G.props:
        if pull(h, Y) not in F.prop_set:
            return (members(Y),)
    return None


def _leq_forth(F, G, h, states=None):
    for x in (range(F.n) if states is None else states):
        for y in bits(F.poset.down[x]):
            if not G.poset.leq(h[y], h[x]):
                return (x, y)
    return None


def _leq_back(F, G, h, states=None):
    for x in (range(F.n) if states is None else states):
        img = push(h, F.poset.down[x])
        for y1 in bits(G.poset.down[h[x]]):
            if not img & G.poset.down[y1]:
                return (x, y1)
    return None


def _p_leq_back(F, G, h, states=None):
    for x in (range(F.n) if states is None else states):
        img = push(h, F.poset.down[x])
        bad = G.poset.down[h[x]] & ~img
        if bad:
            return (x, members(bad)[0])
    return None


def _r_forth(F, G, h, states=None):
    for i in F.indices:
        R, R2 = F.rels[i], G.rels[i]
        for x in (range(F.n) if states is None else states):
            for y in bits(R[x]):
                if not R2[h[x]] >> h[y] & 1:
                    return (i, x, y)
    return None


def _r_back(F, G, h, states=None):
    comp = G.poset.comp
    for i in F.indices:
        R, R2 = F.rels[i], G.rels[i]
        for x in (range(F.n) if states is None else states):
            img = push(h, R[x])
            for y1 in bits(R2[h[x]]):
                for z1 in bits(G.poset.down[y1]):
                    if not comp[z1] & img:
                        return (i, x, y1, z1)
    return None


def _p_r_back(F, G, h, states=None):
    for i in F.indices:
        R, R2 = F.rels[i], G.rels[i]
        for x in (range(F.n) if states is None else states):
            bad = R2[h[x]] & ~push(h, R[x])
            if bad:
                return (i, x, members(bad)[0])
    return None


def _dense(F, G, h):
    img = push(h, F.full_set)
    for x1 in range(G.n):
        if not G.poset.down[x1] & img:
            return (x1,)
    return None


def _image_traces(F, G, h):
    img = push(h, F.full_set)
    traces = {img & Y for Y in G.props}
    for X in F.props:
        if push(h, X) not in traces:
            return (members(X),)
    return None


def _robust(F, G, h):
    for X in F.props:
        if pull(h, push(h, X)) != X:
            return (members(X),)
    return _image_traces(F, G, h)


def _leq_iff(F, G, h):
    for x in range(F.n):
        for y in range(F.n):
            if F.poset.leq(y, x) != G.poset.leq(h[y], h[x]):
                return (x, y)
    return None


def _r_iff(F, G, h):
    for i in F.indices:
        R, R2 = F.rels[i], G.rels[i]
        for x in range(F.n):
            for y in range(F.n):
                if bool(R[x] >> y & 1) != bool(R2[h[x]] >> h[y] & 1):
                    return (i, x, y)
    return None


def _bijective(F, G, h):
    if F.n != G.n or len(set(h)) != F.n:
        return ()
    return None


def _image_admissible(F, G, h):
    for X in F.props:
        if push(h, X) not in G.prop_set:
            return (members(X),)
    return None


CLAUSE_CHECKS = {
    "⊑-matching": _leq_matching,
    "R-matching": _r_matching,
    "pull back": _pull_back,
    "⊑-forth": _leq_forth,
    "⊑-back": _leq_back,
    "R-forth": _r_forth,
    "R-back": _r_back,
    "p-⊑-back": _p_leq_back,
    "p-R-back": _p_r_back,
    "dense": _dense,
    "robust": _robust,
    "⊑ iff": _leq_iff,
    "R iff": _r_iff,
    "image traces": _image_traces,
    "bijective": _bijective,
    "image admissible": _image_admissible,
}


def check_clause(F: PossibilityFrame, G: PossibilityFrame, h: Sequence[int], clause: str):
    if F.indices != G.indices:
        raise FrameMismatch("frames use different modal indices")
    return CLAUSE_CHECKS[clause](F, G, tuple(h))


def check_morphism(spec: MorphismSpec) -> CheckReport:
    F, G, h = spec.source, spec.target, spec.mapping
    if F.indices != G.indices:
        raise FrameMismatch("frames use different modal indices")
    for clause in spec.clauses():
        w = CLAUSE_CHECKS[clause](F, G, h)
        if w is not None:
            return CheckReport.fail(clause, w, f"{spec.grade} morphism clause")
    return CheckReport.ok(f"{spec.grade} morphism")


def r_back_by_closure(F: PossibilityFrame, G: PossibilityFrame, h: Sequence[int], index: str) -> bool:
    """R-back restated: cl(⇓R'(h(x))) ⊆ cl(⇓h[R(x)]) for every x."""
    p2 = G.poset
    for x in range(F.n):
        lhs = p2.closure(p2.down_set(G.rels[index][h[x]]))
        rhs = p2.closure(p2.down_set(push(h, F.rels[index][x])))
        if lhs & ~rhs:
            return False
    return True


def identity(frame: PossibilityFrame, grade: str = "p", flags: Iterable[str] = ()) -> MorphismSpec:
    return MorphismSpec(frame, frame, tuple(range(frame.n)), grade, frozenset(flags))


def compose(f: MorphismSpec, g: MorphismSpec) -> MorphismSpec:
    """g ∘ f: first f, then g."""
    if f.target != g.source:
        raise FrameMismatch("target of the first map is not the source of the second")
    order = {gr: k for k, gr in enumerate(GRADES)}
    grade = f.grade if order[f.grade] <= order[g.grade] else g.grade
    mapping = tuple(g.mapping[y] for y in f.mapping)
    return MorphismSpec(f.source, g.target, mapping, grade)


# ---------------------------------------------------------------- search

_LOCAL = {
    "⊑-matching": _leq_matching,
    "R-matching": _r_matching,
    "⊑-forth": _leq_forth,
    "⊑-back": _leq_back,
    "R-forth": _r_forth,
    "R-back": _r_back,
    "p-⊑-back": _p_leq_back,
    "p-R-back": _p_r_back,
}


def _local_view(F, G, h, clause, x):
    return _LOCAL[clause](F, G, h, (x,))


def find_morphism(source: PossibilityFrame, target: PossibilityFrame, grade: str = "possibility",
                  flags: Iterable[str] = (), node_limit: int = DEFAULT_NODE_LIMIT,
                  candidates: Sequence[Sequence[int]] | None = None) -> MorphismSpec | None:
    """Lexicographically least map satisfying the clauses, or None.

    States are assigned in increasing order.  A state-local clause is checked
    as soon as the state, its refinements and its successors all have values;
    the remaining clauses are checked on complete maps.
    """
    flags = frozenset(flags)
    if source.indices != target.indices:
        raise FrameMismatch("frames use different modal indices")
    probe = MorphismSpec(source, target, (0,) * source.n, grade, flags)
    clauses = probe.clauses()
    local = [c for c in clauses if c in _LOCAL]
    injective = bool(flags & {"strong_embedding", "leq_strong_embedding", "isomorphism"})
    if "isomorphism" in flags and source.n != target.n:
        return None
    n = source.n
    deps = []
    for x in range(n):
        d = source.poset.down[x] | (1 << x)
        for succ in source.rels.values():
            d |= succ[x]
        deps.append(d)
    # states whose dependencies are complete once the prefix 0..k is assigned
    ready_at: list[list[int]] = [[] for _ in range(n)]
    for x in range(n):
        ready_at[max(members(deps[x]))].append(x)
    choices = candidates or [range(target.n)] * n
    h = [0] * n
    used = [False] * target.n
    nodes = 0

    def ok_partial(k):
        hp = h  # entries beyond k are placeholders never read by ready states
        for x in ready_at[k]:
            for c in local:
                if _local_view(source, target, hp, c, x) is not None:
                    return False
        if "⊑ iff" in clauses:
            for y in range(k):
                if source.poset.leq(y, k) != target.poset.leq(h[y], h[k]) or \
                        source.poset.leq(k, y) != target.poset.leq(h[k], h[y]):
                    return False
        if "R iff" in clauses:
            for i in source.indices:
                R, R2 = source.rels[i], target.rels[i]
                for y in range(k + 1):
                    if bool(R[k] >> y & 1) != bool(R2[h[k]] >> h[y] & 1):
                        return False
                    if bool(R[y] >> k & 1) != bool(R2[h[y]] >> h[k] & 1):
                        return False
        return True

    def search(k):
        nonlocal nodes
        if k == n:
            spec = MorphismSpec(source, target, tuple(h), grade, flags)
            return spec if check_morphism(spec).verdict else None
        for v in choices[k]:
            if injective and used[v]:
                continue
            nodes += 1
            if nodes > node_limit:
                raise SearchBudgetExceeded(f"morphism search exceeded {node_limit} nodes")
            h[k] = v
            if not ok_partial(k):
                continue
            used[v] = True
            found = search(k + 1)
            used[v] = False
            if found is not None:
                return found
        return None

    return search(0)


def iter_morphisms(source: PossibilityFrame, target: PossibilityFrame, grade: str = "possibility",
                   flags: Iterable[str] = (), node_limit: int = DEFAULT_NODE_LIMIT):
    """Every satisfying map, in lexicographic order (exhaustive; small frames only)."""
    import itertools
    flags = frozenset(flags)
    count = 0
    for mapping in itertools.product(range(target.n), repeat=source.n):
        count += 1
        if count > node_limit:
            raise SearchBudgetExceeded(f"morphism enumeration exceeded {node_limit} maps")
        spec = MorphismSpec(source, target, mapping, grade, flags)
        if check_morphism(spec).verdict:
            yield spec


def _iso_signature(F: PossibilityFrame, x: int):
    p = F.poset
    sig = [bin(p.down[x]).count("1"), bin(p.up[x]).count("1"),
           sum(1 for Z in F.props if Z >> x & 1)]
    for i in F.indices:
        R = F.rels[i]
        sig.append(bin(R[x]).count("1"))
        sig.append(sum(1 for y in range(F.n) if R[y] >> x & 1))
    return tuple(sig)


def are_isomorphic(F: PossibilityFrame, G: PossibilityFrame,
                   node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[int, ...] | None:
    if F.n != G.n or len(F.props) != len(G.props) or F.indices != G.indices:
        return None
    sf = [_iso_signature(F, x) for x in range(F.n)]
    sg = [_iso_signature(G, x) for x in range(G.n)]
    if sorted(sf) != sorted(sg):
        return None
    cands = [[y for y in range(G.n) if sg[y] == sf[x]] for x in range(F.n)]
    spec = find_morphism(F, G, "p", {"isomorphism"}, node_limit, candidates=cands)
    return None if spec is None else spec.mapping
