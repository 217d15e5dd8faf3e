"""Exhaustive and seeded-random generation of small posets, frames and BAOs.

Isomorphism classes are represented by canonical forms: the least
concatenated adjacency bit-string over all relabelings that keep an
isomorphism-invariant state signature sorted.  Restricting to those
relabelings keeps the form exact while cutting the permutation count.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

from .frame import (FULL, FinitePoset, PossibilityFrame, bits, converse,
                    ro_closed_under_box, violation)

DEFAULT_CAP = 6
BAO_CAP = 3


class CapExceeded(ValueError):
    pass


def _check_cap(n, cap):
    if n > cap:
        raise CapExceeded(f"size {n} exceeds the configured cap {cap}")


# ------------------------------------------------------------- relabeling

def permute_table(table: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    """Relabel a successor table: state x becomes perm[x]."""
    out = [0] * len(table)
    for x, row in enumerate(table):
        m = 0
        for y in bits(row):
            m |= 1 << perm[y]
        out[perm[x]] = m
    return tuple(out)


def permute_set(X: int, perm: Sequence[int]) -> int:
    m = 0
    for y in bits(X):
        m |= 1 << perm[y]
    return m


def _signature_blocks(sig: Sequence) -> list[list[int]]:
    order = sorted(range(len(sig)), key=lambda x: (sig[x], x))
    blocks: list[list[int]] = []
    for x in order:
        if blocks and sig[blocks[-1][0]] == sig[x]:
            blocks[-1].append(x)
        else:
            blocks.append([x])
    return blocks


def signature_perms(sig: Sequence) -> Iterator[list[int]]:
    """All relabelings (old -> new) that list states in signature order."""
    blocks = _signature_blocks(sig)
    n = len(sig)
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        perm = [0] * n
        pos = 0
        for block in choice:
            for x in block:
                perm[x] = pos
                pos += 1
        yield perm


def _encode(tables) -> tuple:
    return tuple(tuple(t) for t in tables)


def canonical_tables(tables: Sequence[Sequence[int]], sig: Sequence,
                     sets: Sequence[Sequence[int]] = ()) -> tuple:
    """Least relabeled encoding of successor tables plus families of sets."""
    best = None
    for perm in signature_perms(sig):
        enc = (_encode(permute_table(t, perm) for t in tables),
               tuple(tuple(sorted(permute_set(X, perm) for X in fam)) for fam in sets))
        if best is None or enc < best:
            best = enc
    return best


def poset_signature(p: FinitePoset) -> list[tuple[int, int]]:
    return [(bin(p.down[x]).count("1"), bin(p.up[x]).count("1")) for x in range(p.n)]


def canonical_poset_form(p: FinitePoset) -> tuple:
    return canonical_tables([p.down], poset_signature(p))


def canonical_poset(p: FinitePoset) -> FinitePoset:
    form = canonical_poset_form(p)
    return FinitePoset(p.n, down=form[0][0])


def frame_signature(f: PossibilityFrame) -> list[tuple]:
    p = f.poset
    sig = []
    for x in range(f.n):
        s = [bin(p.down[x]).count("1"), bin(p.up[x]).count("1")]
        for i in f.indices:
            s.append(bin(f.rels[i][x]).count("1"))
            s.append(bin(converse(f.rels[i])[x]).count("1"))
        s.append(sum(1 for Z in f.props if Z >> x & 1))
        sig.append(tuple(s))
    return sig


def canonical_frame_form(f: PossibilityFrame) -> tuple:
    tables = [f.poset.down] + [f.rels[i] for i in f.indices]
    return (tuple(f.indices), f.extended,
            canonical_tables(tables, frame_signature(f), [f.props]))


def automorphisms(p: FinitePoset) -> list[list[int]]:
    return [perm for perm in signature_perms(poset_signature(p))
            if permute_table(p.down, perm) == p.down]


# ------------------------------------------------------------------ posets

def _ideals(p: FinitePoset) -> Iterator[int]:
    for X in range(p.full + 1):
        if p.down_set(X) == X:
            yield X


def enumerate_posets(n: int, cap: int = DEFAULT_CAP) -> Iterator[FinitePoset]:
    """One poset per isomorphism class, in canonical-form order."""
    _check_cap(n, cap)
    if n < 1:
        return iter(())
    return iter(_posets(n))


_POSET_CACHE: dict[int, list[FinitePoset]] = {}


def _posets(n: int) -> list[FinitePoset]:
    if n in _POSET_CACHE:
        return _POSET_CACHE[n]
    if n == 1:
        out = [FinitePoset(1)]
    else:
        forms = {}
        for q in _posets(n - 1):
            # add a new maximal element above an order ideal
            for ideal in _ideals(q):
                down = list(q.down) + [ideal | 1 << (n - 1)]
                p = FinitePoset(n, down=down)
                forms.setdefault(canonical_poset_form(p), None)
        out = [FinitePoset(n, down=form[0][0]) for form in sorted(forms)]
    _POSET_CACHE[n] = out
    return out


def all_labeled_posets(n: int) -> Iterator[FinitePoset]:
    """Every partial order on range(n); exponential, used as an oracle."""
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        down = [1 << x for x in range(n)]
        for (x, y), c in zip(pairs, choice):
            if c:
                down[y] |= 1 << x
        try:
            yield FinitePoset(n, down=down)
        except ValueError:
            continue


# ---------------------------------------------------------------- relations

def all_relations(n: int) -> Iterator[tuple[int, ...]]:
    rows = range(1 << n)
    return itertools.product(rows, repeat=n)


def full_frame_relations(p: FinitePoset) -> list[tuple[int, ...]]:
    """Every relation with RO closed under box: R-rule and R⇒win.

    Rows are chosen in a linear extension of the order, refinements first,
    pruning on the R-rule containment between each state and the states it
    refines.
    """
    n = p.n
    comp = p.comp
    cover = []
    for row in range(1 << n):
        c = 0
        for y in bits(row):
            c |= comp[y]
        cover.append(c)
    order = sorted(range(n), key=lambda x: (bin(p.down[x]).count("1"), x))
    below = {x: [y for y in bits(p.down[x]) if y != x] for x in range(n)}
    out = []
    rows = [0] * n

    def extend(k):
        if k == n:
            succ = tuple(rows)
            if violation(p, succ, "R⇒win") is None:
                out.append(succ)
            return
        x = order[k]
        for row in range(1 << n):
            c = cover[row]
            if all(cover[rows[y]] & ~c == 0 for y in below[x]):
                rows[x] = row
                extend(k + 1)
        rows[x] = 0

    extend(0)
    out.sort()
    return out


def _dedupe_relations(p: FinitePoset, rel_tuples, auts) -> list:
    n = p.n
    # per automorphism: row relabeling table and the inverse state map
    maps = []
    for perm in auts:
        inv = [0] * n
        for x, y in enumerate(perm):
            inv[y] = x
        maps.append(([permute_set(row, perm) for row in range(1 << n)], inv))
    seen = {}
    for rels in rel_tuples:
        key = min(tuple(tuple(rowmap[r[i]] for i in inv) for r in rels)
                  for rowmap, inv in maps)
        seen.setdefault(key, rels)
    return [seen[k] for k in sorted(seen)]


def enumerate_full_frames(n: int, indices: Sequence[str] = ("i",), cap: int = DEFAULT_CAP,
                          dedupe: bool = True) -> Iterator[PossibilityFrame]:
    """Full frames on every poset of size n, up to isomorphism."""
    _check_cap(n, cap)
    indices = sorted(indices)
    for p in _posets(n):
        good = full_frame_relations(p)
        combos = itertools.product(good, repeat=len(indices))
        if dedupe:
            combos = _dedupe_relations(p, combos, automorphisms(p))
        for rels in combos:
            yield PossibilityFrame(p, dict(zip(indices, rels)), FULL)


def enumerate_kripke_frames(n: int, indices: Sequence[str] = ("i",),
                            dedupe: bool = True) -> Iterator[PossibilityFrame]:
    p = FinitePoset.discrete(n)
    indices = sorted(indices)
    combos = itertools.product(list(all_relations(n)), repeat=len(indices))
    if dedupe:
        combos = _dedupe_relations(p, combos, automorphisms(p))
    for rels in combos:
        yield PossibilityFrame(p, dict(zip(indices, rels)), FULL)


# -------------------------------------------------------------------- BAOs

def enumerate_baos(m: int, indices: Sequence[str] = ("i",), cap: int = BAO_CAP,
                   dedupe: bool = True):
    """Finite BAOs on the powerset of m atoms, up to atom relabeling.

    On a finite powerset algebra the normal meet-preserving operators are
    exactly the maps X ↦ {a | R(a) ⊆ X} for relations R on the atoms.
    """
    from .bao import FiniteBAO
    _check_cap(m, cap)
    indices = sorted(indices)
    rels_all = list(all_relations(m))
    combos = itertools.product(rels_all, repeat=len(indices))
    if dedupe:
        perms = [list(q) for q in itertools.permutations(range(m))]
        seen = {}
        for rels in combos:
            key = min(tuple(permute_table(r, q) for r in rels) for q in perms)
            seen.setdefault(key, rels)
        combos = [seen[k] for k in sorted(seen)]
    for rels in combos:
        yield FiniteBAO.from_atom_relations(m, dict(zip(indices, rels)))


# ----------------------------------------------------------------- random

def random_poset(rng: random.Random, n: int) -> FinitePoset:
    return rng.choice(_posets(n))


def _random_ro_row(rng, p):
    ro = p.regular_opens
    return rng.choice(ro)


def random_full_frame(rng: random.Random, n: int, indices=("i",), tries: int = 400,
                      poset: FinitePoset | None = None) -> PossibilityFrame:
    """Rejection sampling of relations with RO closed under box.

    Rows are drawn as regular open sets or arbitrary sets; the empty and
    universal relations always qualify, so the loop falls back to those.
    """
    p = poset or random_poset(rng, n)
    rels = {}
    for i in sorted(indices):
        chosen = None
        for _ in range(tries):
            mode = rng.random()
            if mode < 0.5:
                succ = tuple(_random_ro_row(rng, p) for _ in range(p.n))
            elif mode < 0.8:
                succ = tuple(rng.randrange(1 << p.n) for _ in range(p.n))
            else:
                row = _random_ro_row(rng, p)
                succ = tuple(row if rng.random() < 0.7 else 0 for _ in range(p.n))
            if ro_closed_under_box(p, succ):
                chosen = succ
                break
        if chosen is None:
            chosen = tuple(p.full if rng.random() < 0.5 else 0 for _ in range(p.n))
            chosen = tuple([p.full] * p.n) if not ro_closed_under_box(p, chosen) else chosen
        rels[i] = chosen
    return PossibilityFrame(p, rels, FULL)


def generated_subalgebra(frame: PossibilityFrame, seeds: Sequence[int]) -> tuple[int, ...]:
    """Least family containing the seeds, ∅, closed under ∩, ⊃ and each box."""
    fam = {0, frame.full_set} | set(seeds)
    changed = True
    while changed:
        changed = False
        cur = sorted(fam)
        new = set()
        for a in cur:
            new.add(frame.neg(a))
            for i in frame.indices:
                new.add(frame.box(i, a))
            for b in cur:
                new.add(a & b)
                new.add(frame.implication(a, b))
        if not new <= fam:
            fam |= new
            changed = True
    return tuple(sorted(fam))


def random_frame(seed: int, max_states: int = 5, indices=("i",),
                 full_probability: float = 0.6) -> PossibilityFrame:
    """A seeded random possibility frame with at most max_states states.

    Either a full frame, or a full frame's relations with the admissible
    family cut down to the subalgebra generated by a few random RO sets.
    """
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    full = random_full_frame(rng, n, indices)
    if rng.random() < full_probability:
        return full
    ro = full.poset.regular_opens
    seeds = [rng.choice(ro) for _ in range(rng.randint(0, 2))]
    return PossibilityFrame(full.poset, full.rels, generated_subalgebra(full, seeds))


def random_kripke_frame(seed: int, max_worlds: int = 3, indices=("i",)) -> PossibilityFrame:
    rng = random.Random(seed)
    n = rng.randint(1, max_worlds)
    p = FinitePoset.discrete(n)
    rels = {i: tuple(rng.randrange(1 << n) for _ in range(n)) for i in sorted(indices)}
    return PossibilityFrame(p, rels, FULL)


def random_bao(seed: int, max_atoms: int = 3, indices=("i",)):
    from .bao import FiniteBAO
    rng = random.Random(seed)
    m = rng.randint(1, max_atoms)
    rels = {i: tuple(rng.randrange(1 << m) for _ in range(m)) for i in sorted(indices)}
    return FiniteBAO.from_atom_relations(m, rels)
