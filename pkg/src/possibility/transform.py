"""Validity-preserving constructions on finite frames.

Constructions that collapse or relabel states also return the state map
from the input frame, as a tuple indexed by input state.
"""
from __future__ import annotations

from typing import Sequence

from .frame import (FinitePoset, FrameError, PossibilityFrame, bits, image, lowest,
                    members, restrict_to_proper, tight_relation, to_mask, validate_frame)


def _require_valid(frame: PossibilityFrame):
    rep = validate_frame(frame)
    if not rep.verdict:
        raise FrameError(f"invalid frame: {rep.condition} {rep.detail}".strip())


def _is_discrete(frame: PossibilityFrame) -> bool:
    return all(d == 1 << x for x, d in enumerate(frame.poset.down))


def _quotient(frame: PossibilityFrame, classes: Sequence[int], leq_rel) -> tuple:
    """Common bookkeeping: classes as bitsets, renumbered by least member."""
    reps = sorted({lowest(c) for c in classes})
    index = {r: k for k, r in enumerate(reps)}
    hmap = tuple(index[lowest(classes[x])] for x in range(frame.n))
    m = len(reps)
    down = [to_mask(index[s] for s in reps if leq_rel(s, r)) for r in reps]
    return reps, hmap, FinitePoset(m, down=down)


def push_set(hmap: Sequence[int], X: int) -> int:
    return to_mask(hmap[x] for x in bits(X))


def pull_set(hmap: Sequence[int], Y: int) -> int:
    return to_mask(x for x, y in enumerate(hmap) if Y >> y & 1)


# ----------------------------------------------------------- possibilization

def powerset_state(world_set: int) -> int:
    """State index of a nonempty set of worlds in the possibilization."""
    return world_set - 1


def powerset_possibilization(world: PossibilityFrame) -> PossibilityFrame:
    """Nonempty sets of worlds ordered by inclusion; state k is world set k+1."""
    if not _is_discrete(world):
        raise FrameError("powerset possibilization needs a world frame (discrete order)")
    w = world.n
    m = (1 << w) - 1
    down = []
    for X in range(1, m + 1):
        down.append(to_mask(Y - 1 for Y in range(1, m + 1) if Y & ~X == 0))
    rels = {}
    for i, succ in world.rels.items():
        rows = []
        for X in range(1, m + 1):
            reach = image(succ, X)
            rows.append(to_mask(Y - 1 for Y in range(1, m + 1) if Y & ~reach == 0))
        rels[i] = tuple(rows)
    poset = FinitePoset(m, down=down)
    props = {0} | {poset.down[X - 1] for X in world.props if X}
    return PossibilityFrame(poset, rels, props)


def possibilize_valuation(valuation: dict[str, int]) -> dict[str, int]:
    """π(p) = nonempty world sets inside V(p)."""
    out = {}
    for name, V in valuation.items():
        out[name] = to_mask(Y - 1 for Y in range(1, V + 1) if Y & ~V == 0)
    return out


# ------------------------------------------------------------ relation moves

def box_tighten(frame: PossibilityFrame) -> PossibilityFrame:
    """Replace each relation by xR□y iff y ∈ Z whenever x ∈ ■Z, Z ∈ P."""
    _require_valid(frame)
    rels = {i: tight_relation(frame, i) for i in frame.indices}
    return frame.with_relations(rels)


def functionalize(frame: PossibilityFrame) -> PossibilityFrame:
    """Each relation becomes the partial function x ↦ max R(x)."""
    from .frame import _v_max
    p = frame.poset
    rels = {}
    for i, succ in frame.rels.items():
        w = _v_max(p, succ)
        if w is not None:
            raise FrameError(f"R-max fails for index {i} at state {w[0]}")
        rows = []
        for row in succ:
            top = 0
            for m in bits(row):
                if row & ~p.down[m] == 0:
                    top = 1 << m
                    break
            rows.append(top)
        rels[i] = tuple(rows)
    return frame.with_relations(rels)


# ---------------------------------------------------------------- quotients

def separative_quotient(frame: PossibilityFrame) -> tuple[PossibilityFrame, tuple[int, ...]]:
    _require_valid(frame)
    p = frame.poset
    n = p.n
    classes = [to_mask(y for y in range(n) if p.s_refines(x, y) and p.s_refines(y, x))
               for x in range(n)]
    reps, hmap, poset = _quotient(frame, classes, p.s_refines)
    rels = {}
    for i, succ in frame.rels.items():
        rows = [0] * len(reps)
        for x in range(n):
            for y in bits(succ[x]):
                rows[hmap[x]] |= 1 << hmap[y]
        rels[i] = tuple(rows)
    props = {push_set(hmap, X) for X in frame.props}
    return PossibilityFrame(poset, rels, props), hmap


def tighten(frame: PossibilityFrame) -> tuple[PossibilityFrame, tuple[int, ...]]:
    """Order by admissible-set inclusion, collapse equivalents, tighten relations."""
    _require_valid(frame)
    n = frame.n
    sets_at = [frozenset(Z for Z in frame.props if Z >> x & 1) for x in range(n)]

    def below(x, y):
        return sets_at[y] <= sets_at[x]

    classes = [to_mask(y for y in range(n) if sets_at[y] == sets_at[x]) for x in range(n)]
    reps, hmap, poset = _quotient(frame, classes, below)
    props = sorted({push_set(hmap, X) for X in frame.props})
    rels = {}
    for i in frame.indices:
        rows = []
        for r in reps:
            row = poset.full
            for Z in frame.props:
                if frame.box(i, Z) >> r & 1:
                    row &= push_set(hmap, Z)
            rows.append(row)
        rels[i] = tuple(rows)
    return PossibilityFrame(poset, rels, props), hmap


# ---------------------------------------------------------- atom structures

def atom_structure(frame: PossibilityFrame) -> tuple[PossibilityFrame, tuple[int, ...]]:
    """World frame on the minimal points; returns it with the inclusion map."""
    p = frame.poset
    atoms = members(p.minimal)
    if any(not (p.down[x] & p.minimal) for x in range(p.n)):
        raise FrameError("frame is not atomic")
    index = {a: k for k, a in enumerate(atoms)}
    k = len(atoms)
    rels = {}
    for i, succ in frame.rels.items():
        rows = []
        for a in atoms:
            seen = p.down_set(succ[a]) & p.minimal
            rows.append(to_mask(index[b] for b in bits(seen)))
        rels[i] = tuple(rows)
    props = {to_mask(index[b] for b in bits(X & p.minimal)) for X in frame.props}
    return PossibilityFrame(FinitePoset.discrete(k), rels, props), tuple(atoms)


# ------------------------------------------------------------------ unions

def disjoint_union(frames: Sequence[PossibilityFrame]) -> tuple[PossibilityFrame, list[tuple[int, ...]]]:
    """Tagged union; returns the frame and one embedding per summand."""
    if not frames:
        raise FrameError("disjoint union of no frames")
    idx = frames[0].indices
    if any(f.indices != idx for f in frames):
        raise FrameError("summands use different modal indices")
    offsets = []
    total = 0
    for f in frames:
        offsets.append(total)
        total += f.n
    down = []
    rels = {i: [] for i in idx}
    for f, off in zip(frames, offsets):
        down.extend(d << off for d in f.poset.down)
        for i in idx:
            rels[i].extend(r << off for r in f.rels[i])
    props = [0]
    for f, off in zip(frames, offsets):
        props = [X | (Y << off) for X in props for Y in f.props]
    embeds = [tuple(range(off, off + f.n)) for f, off in zip(frames, offsets)]
    return PossibilityFrame(FinitePoset(total, down=down), rels, props), embeds


# --------------------------------------------------------------- subframes

def subframe_kind(frame: PossibilityFrame, subset: int) -> str:
    p = frame.poset
    closed = all(p.down[x] & ~subset == 0 for x in bits(subset)) and all(
        succ[x] & ~subset == 0 for succ in frame.rels.values() for x in bits(subset))
    if closed:
        return "generated"
    ok = all(p.down[y] & subset for x in bits(subset) for y in bits(p.down[x]))
    if ok:
        for succ in frame.rels.values():
            for x in bits(subset):
                for y in bits(succ[x]):
                    for u in bits(p.down[y]):
                        if not p.comp[u] & subset & succ[x]:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
    return "selective" if ok else "neither"


def subframe(frame: PossibilityFrame, subset) -> tuple[PossibilityFrame, str, tuple[int, ...]]:
    """Restriction to a subset of states; returns frame, kind and inclusion."""
    if not isinstance(subset, int):
        subset = to_mask(subset)
    if subset == 0:
        raise FrameError("subframe of no states")
    keep = members(subset)
    index = {x: k for k, x in enumerate(keep)}

    def restrict(X):
        return to_mask(index[x] for x in bits(X & subset))

    p = frame.poset
    poset = FinitePoset(len(keep), down=[restrict(p.down[x]) for x in keep])
    rels = {i: tuple(restrict(s[x]) for x in keep) for i, s in frame.rels.items()}
    props = {restrict(X) for X in frame.props}
    return PossibilityFrame(poset, rels, props), subframe_kind(frame, subset), keep


# ---------------------------------------------------------- extended frames

def extend_bot(frame: PossibilityFrame) -> PossibilityFrame:
    """Add an impossible state as state 0; old state x becomes x+1."""
    n = frame.n
    down = [1] + [(d << 1) | 1 for d in frame.poset.down]
    rels = {i: tuple([1] + [(r << 1) | 1 for r in s]) for i, s in frame.rels.items()}
    props = {(X << 1) | 1 for X in frame.props}
    return PossibilityFrame(FinitePoset(n + 1, down=down), rels, props, extended=True)


def restrict_bot(frame: PossibilityFrame) -> PossibilityFrame:
    if not frame.extended:
        raise FrameError("frame is not marked as extended")
    p = frame.poset
    ok = (p.up[0] == p.full and all(s[0] == 1 and all(r & 1 for r in s)
                                    for s in frame.rels.values())
          and all(X & 1 for X in frame.props))
    if not ok:
        raise FrameError("frame does not satisfy the extended-frame conditions")
    return restrict_to_proper(frame)


def extend_valuation(valuation: dict[str, int]) -> dict[str, int]:
    return {k: (v << 1) | 1 for k, v in valuation.items()}
