"""Finite Boolean algebras with operators and their dualities with frames.

A finite BAO is stored as a field of sets over ``atoms`` atoms: each element
is a bitmask over the atoms, and each modal index has a table sending an
element to its box.  Algebras coming from frames keep ``labels``, the frame
state set each element encodes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .formula import RESERVED_VAR, And, Formula, Imp, Neg, Var, variables
from .frame import (FULL, CheckReport, FinitePoset, FrameError, PossibilityFrame, bits,
                    classify, to_mask, validate_frame)
from .morphism import MorphismSpec, pull

POWERSET = "powerset"


class BAOError(ValueError):
    pass


class FiniteBAO:
    def __init__(self, atoms: int, elements: Iterable[int] | str,
                 ops: Mapping[str, Mapping[int, int]],
                 labels: Mapping[int, object] | None = None):
        self.atoms = atoms
        self.top = (1 << atoms) - 1
        if elements == POWERSET:
            elements = range(self.top + 1)
        self.elements: tuple[int, ...] = tuple(sorted(set(elements)))
        self.element_set = frozenset(self.elements)
        self.ops = {i: dict(ops[i]) for i in sorted(ops)}
        self.labels = dict(labels) if labels is not None else None
        self.codes = {v: k for k, v in self.labels.items()} if labels is not None else None

    @classmethod
    def from_atom_relations(cls, m: int, rels: Mapping[str, Sequence[int]]) -> "FiniteBAO":
        """Powerset of m atoms with ■X = {a | R(a) ⊆ X}."""
        ops = {}
        for i, succ in rels.items():
            ops[i] = {X: to_mask(a for a in range(m) if succ[a] & ~X == 0)
                      for X in range(1 << m)}
        return cls(m, POWERSET, ops)

    @property
    def indices(self) -> list[str]:
        return list(self.ops)

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(x for x in self.elements if x)

    def comp(self, x: int) -> int:
        return self.top & ~x

    def box(self, i: str, x: int) -> int:
        try:
            return self.ops[i][x]
        except KeyError:
            raise KeyError(f"unknown modal index {i!r} or element {x}") from None

    def dia(self, i: str, x: int) -> int:
        return self.comp(self.box(i, self.comp(x)))

    def below(self, y: int) -> list[int]:
        return [x for x in self.elements if x & ~y == 0]

    def algebra_atoms(self) -> list[int]:
        nz = self.nonzero
        return [a for a in nz if not any(b != a and b & ~a == 0 for b in nz)]

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.top
        for x in xs:
            out &= x
        return out

    def key(self):
        return (self.atoms, self.elements, tuple((i, tuple(sorted(t.items())))
                                                  for i, t in self.ops.items()))

    def __eq__(self, other):
        return isinstance(other, FiniteBAO) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FiniteBAO(atoms={self.atoms}, elements={len(self.elements)}, indices={self.indices})"


@dataclass(frozen=True)
class BAOMap:
    source: FiniteBAO
    target: FiniteBAO
    table: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, source, target, mapping: Mapping[int, int]) -> "BAOMap":
        return cls(source, target, tuple(sorted(mapping.items())))

    def __call__(self, x: int) -> int:
        return dict(self.table)[x]

    def as_dict(self) -> dict[int, int]:
        return dict(self.table)


# ------------------------------------------------------------- validation

def validate_bao(b: FiniteBAO) -> CheckReport:
    E = b.element_set
    if 0 not in E or b.top not in E:
        return CheckReport.fail("bottom and top are elements", ())
    for x in b.elements:
        if b.comp(x) not in E:
            return CheckReport.fail("closed under complement", (x,))
        for y in b.elements:
            if x & y not in E:
                return CheckReport.fail("closed under meet", (x, y))
    for i, table in b.ops.items():
        for x in b.elements:
            if x not in table or table[x] not in E:
                return CheckReport.fail(f"operator {i} is total on elements", (x,))
        if table[b.top] != b.top:
            return CheckReport.fail(f"■{i}⊤ = ⊤", (b.top,))
        for x in b.elements:
            for y in b.elements:
                if table[x & y] != table[x] & table[y]:
                    return CheckReport.fail(f"■{i} preserves meets", (x, y))
    return CheckReport.ok("BAO")


def _require(b: FiniteBAO):
    rep = validate_bao(b)
    if not rep.verdict:
        raise BAOError(f"invalid BAO: {rep.condition} at {rep.witness}")


def bao_relation(b: FiniteBAO, i: str) -> dict[int, int]:
    """xRy iff every nonzero y' ≤ y has x ∧ ♦y' ≠ ⊥; rows as sets of elements."""
    dia = {y: b.dia(i, y) for y in b.elements}
    out = {}
    for x in b.nonzero:
        row = set()
        for y in b.nonzero:
            if all(x & dia[y1] for y1 in b.below(y) if y1):
                row.add(y)
        out[x] = frozenset(row)
    return out


def v_condition(b: FiniteBAO, i: str):
    """First (x, y) with x ∧ ♦y ≠ ⊥ but no nonzero y' ≤ y with xRy', or None."""
    R = bao_relation(b, i)
    for x in b.nonzero:
        for y in b.nonzero:
            if x & b.dia(i, y) and not any(y1 in R[x] for y1 in b.below(y) if y1):
                return (x, y)
    return None


def left_adjoint(b: FiniteBAO, i: str) -> dict[int, int] | None:
    """The candidate f(x) = ⋀{y | x ≤ ■y}, if it satisfies x ≤ ■y ⟺ f(x) ≤ y."""
    f = {x: b.meet_all(y for y in b.elements if x & ~b.box(i, y) == 0) for x in b.elements}
    for x in b.elements:
        for y in b.elements:
            if (x & ~b.box(i, y) == 0) != (f[x] & ~y == 0):
                return None
    return f


def classify_bao(b: FiniteBAO) -> dict[str, bool]:
    _require(b)
    return {
        "trivial": len(b.elements) == 1,
        "V_condition": all(v_condition(b, i) is None for i in b.indices),
        "T_adjoint": all(left_adjoint(b, i) is not None for i in b.indices),
    }


# ----------------------------------------------------------- frame → BAO

def underlying_bao(frame: PossibilityFrame) -> FiniteBAO:
    """The algebra of admissible sets, coded over its own atoms."""
    rep = validate_frame(frame)
    if not rep.verdict:
        raise FrameError(f"invalid frame: {rep.condition}")
    P = frame.props
    bottom = min(P)  # ∅, or {⊥} in an extended frame
    nz = [X for X in P if X != bottom]
    patoms = [A for A in nz if not any(B != A and B & ~A == 0 for B in nz)]

    def code(X):
        return to_mask(k for k, A in enumerate(patoms) if A & ~X == 0)

    labels = {code(X): X for X in P}
    ops = {i: {code(X): code(frame.box(i, X)) for X in P} for i in frame.indices}
    return FiniteBAO(len(patoms), labels.keys(), ops, labels)


def algebra_code(b: FiniteBAO, X: int) -> int:
    """Element of an underlying BAO encoding the frame set X."""
    return b.codes[X]


# ----------------------------------------------------------- BAO → frames

def _bao_poset(b: FiniteBAO) -> tuple[FinitePoset, tuple[int, ...]]:
    states = b.nonzero
    down = [to_mask(t for t, y in enumerate(states) if y & ~x == 0) for x in states]
    return FinitePoset(len(states), down=down), states


def _frame_relations(b: FiniteBAO, states) -> dict[str, tuple[int, ...]]:
    index = {x: s for s, x in enumerate(states)}
    rels = {}
    for i in b.indices:
        R = bao_relation(b, i)
        rels[i] = tuple(to_mask(index[y] for y in R[x]) for x in states)
    return rels


def principal_frame(b: FiniteBAO) -> PossibilityFrame:
    """A•: nonzero elements, principal downsets admissible."""
    _require(b)
    if len(b.elements) == 1:
        raise BAOError("the trivial BAO has no nonzero elements")
    poset, states = _bao_poset(b)
    props = {0} | set(poset.down)
    return PossibilityFrame(poset, _frame_relations(b, states), props, labels=states)


def full_frame(b: FiniteBAO) -> PossibilityFrame:
    """A◦: as A• but with every regular open set admissible."""
    _require(b)
    if len(b.elements) == 1:
        raise BAOError("the trivial BAO has no nonzero elements")
    poset, states = _bao_poset(b)
    return PossibilityFrame(poset, _frame_relations(b, states), FULL, labels=states)


def filters(b: FiniteBAO) -> list[frozenset]:
    """Proper filters; at finite size each is ↑a for a nonzero a."""
    return [up_filter(b, a) for a in b.nonzero]


def up_filter(b: FiniteBAO, a: int) -> frozenset:
    return frozenset(x for x in b.elements if a & ~x == 0)


def is_proper_filter(b: FiniteBAO, F: frozenset) -> bool:
    if not F or 0 in F:
        return False
    for x in F:
        for y in b.elements:
            if x & ~y == 0 and y not in F:
                return False
        for y in F:
            if x & y not in F:
                return False
    return True


def all_proper_filters(b: FiniteBAO) -> list[frozenset]:
    """Exhaustive scan of element subsets; exponential, used as an oracle."""
    els = b.elements
    out = []
    for choice in range(1, 1 << len(els)):
        F = frozenset(els[k] for k in range(len(els)) if choice >> k & 1)
        if is_proper_filter(b, F):
            out.append(F)
    return out


def generated_filter(b: FiniteBAO, seeds: Iterable[int]) -> frozenset | str:
    a = b.meet_all(seeds)
    if a == 0:
        return "improper"
    return up_filter(b, a)


def filter_generator(b: FiniteBAO, F: Iterable[int]) -> int:
    return b.meet_all(F)


def _filter_frame(b: FiniteBAO, general: bool) -> PossibilityFrame:
    _require(b)
    if len(b.elements) == 1:
        raise BAOError("the trivial BAO has no proper filters")
    gens = b.nonzero
    fs = [up_filter(b, a) for a in gens]
    n = len(fs)
    down = [to_mask(t for t in range(n) if fs[t] >= fs[s]) for s in range(n)]
    poset = FinitePoset(n, down=down)
    rels = {}
    for i in b.indices:
        rows = []
        for s in range(n):
            boxed = [x for x in b.elements if b.box(i, x) in fs[s]]
            rows.append(to_mask(t for t in range(n) if all(x in fs[t] for x in boxed)))
        rels[i] = tuple(rows)
    if general:
        props = {hat(b, x, fs) for x in b.elements}
    else:
        props = FULL
    return PossibilityFrame(poset, rels, props, labels=gens)


def hat(b: FiniteBAO, x: int, fs: Sequence[frozenset] | None = None) -> int:
    """x̂: the filter states containing x."""
    fs = fs if fs is not None else filters(b)
    return to_mask(s for s, F in enumerate(fs) if x in F)


def filter_frame(b: FiniteBAO) -> PossibilityFrame:
    return _filter_frame(b, general=False)


def general_filter_frame(b: FiniteBAO) -> PossibilityFrame:
    return _filter_frame(b, general=True)


# ----------------------------------------------------------- homomorphisms

def check_bao_hom(h: BAOMap, complete: bool = False) -> CheckReport:
    A, B, t = h.source, h.target, h.as_dict()
    for x in A.elements:
        if x not in t or t[x] not in B.element_set:
            return CheckReport.fail("total map into target elements", (x,))
    if A.indices != B.indices:
        return CheckReport.fail("same modal indices", ())
    if t[A.top] != B.top:
        return CheckReport.fail("preserves top", (A.top,))
    for x in A.elements:
        if t[A.comp(x)] != B.comp(t[x]):
            return CheckReport.fail("preserves complement", (x,))
        for y in A.elements:
            if t[x & y] != t[x] & t[y]:
                return CheckReport.fail("preserves meet", (x, y))
        for i in A.indices:
            if t[A.box(i, x)] != B.box(i, t[x]):
                return CheckReport.fail(f"preserves ■{i}", (x,))
    if complete:
        els = A.elements
        if len(els) > 16:
            raise BAOError("complete-meet check limited to 16 elements")
        for choice in range(1 << len(els)):
            xs = [els[k] for k in range(len(els)) if choice >> k & 1]
            if t[A.meet_all(xs)] != B.meet_all(t[x] for x in xs):
                return CheckReport.fail("preserves arbitrary meets", tuple(xs))
    return CheckReport.ok("BAO homomorphism")


def is_bao_isomorphism(h: BAOMap) -> bool:
    t = h.as_dict()
    return (check_bao_hom(h).verdict and len(set(t.values())) == len(h.source.elements)
            and set(t.values()) == h.target.element_set)


def bao_isomorphism(A: FiniteBAO, B: FiniteBAO) -> BAOMap | None:
    """Search atom bijections for a BAO isomorphism."""
    if len(A.elements) != len(B.elements) or A.indices != B.indices:
        return None
    aa, ab = A.algebra_atoms(), B.algebra_atoms()
    if len(aa) != len(ab):
        return None
    for perm in itertools.permutations(ab):
        t = {}
        for x in A.elements:
            y = 0
            for a, b_ in zip(aa, perm):
                if a & ~x == 0:
                    y |= b_
            t[x] = y
        h = BAOMap.of(A, B, t)
        if is_bao_isomorphism(h):
            return h
    return None


def product(bs: Sequence[FiniteBAO]) -> FiniteBAO:
    if not bs:
        raise BAOError("product of no algebras")
    idx = bs[0].indices
    if any(b.indices != idx for b in bs):
        raise BAOError("factors use different modal indices")
    offsets, total = [], 0
    for b in bs:
        offsets.append(total)
        total += b.atoms
    elements = [0]
    for b, off in zip(bs, offsets):
        elements = [e | (x << off) for e in elements for x in b.elements]
    ops = {}
    for i in idx:
        table = {}
        for e in elements:
            v = 0
            for b, off in zip(bs, offsets):
                part = (e >> off) & b.top
                v |= b.box(i, part) << off
            table[e] = v
        ops[i] = table
    return FiniteBAO(total, elements, ops)


def subalgebra(b: FiniteBAO, seeds: Iterable[int]) -> FiniteBAO:
    fam = {0, b.top} | set(seeds)
    if not fam <= b.element_set:
        raise BAOError("seed is not an element")
    while True:
        new = set(fam)
        for x in fam:
            new.add(b.comp(x))
            for i in b.indices:
                new.add(b.box(i, x))
            for y in fam:
                new.add(x & y)
        if new == fam:
            break
        fam = new
    ops = {i: {x: b.box(i, x) for x in fam} for i in b.indices}
    return FiniteBAO(b.atoms, fam, ops)


# ------------------------------------------------------------------ validity

def meaning(b: FiniteBAO, f: Formula, env: Mapping[str, int]) -> int:
    if isinstance(f, Var):
        if f.name in env:
            return env[f.name]
        if f.name == RESERVED_VAR:
            return 0
        raise KeyError(f"unbound variable {f.name!r}")
    if isinstance(f, Neg):
        return b.comp(meaning(b, f.child, env))
    if isinstance(f, And):
        return meaning(b, f.left, env) & meaning(b, f.right, env)
    if isinstance(f, Imp):
        return b.comp(meaning(b, f.left, env)) | meaning(b, f.right, env)
    return b.box(f.index, meaning(b, f.child, env))


def algebraic_valid(b: FiniteBAO, f: Formula) -> CheckReport:
    _require(b)
    names = [v for v in variables(f) if v != RESERVED_VAR]
    for choice in itertools.product(b.elements, repeat=len(names)):
        env = dict(zip(names, choice))
        if meaning(b, f, env) != b.top:
            return CheckReport.fail("algebraically valid", tuple(choice), "falsifying assignment",
                                    valuation=env)
    return CheckReport.ok("algebraically valid")


# ---------------------------------------------------------- comparison maps

def zeta_A(b: FiniteBAO) -> BAOMap:
    """x ↦ {nonzero x' ≤ x}, into the algebra of the principal frame."""
    F = principal_frame(b)
    U = underlying_bao(F)
    t = {}
    for x in b.elements:
        X = to_mask(s for s, y in enumerate(F.labels) if y & ~x == 0)
        t[x] = U.codes[X]
    return BAOMap.of(b, U, t)


def eta_A(b: FiniteBAO) -> BAOMap:
    """x ↦ x̂, into the algebra of the general filter frame."""
    F = general_filter_frame(b)
    U = underlying_bao(F)
    fs = [up_filter(b, a) for a in F.labels]
    return BAOMap.of(b, U, {x: U.codes[hat(b, x, fs)] for x in b.elements})


def zeta_F(frame: PossibilityFrame) -> MorphismSpec:
    """x ↦ {x' | x' ⊑s x}, as a state of the principal frame of F⋆."""
    U = underlying_bao(frame)
    T = principal_frame(U)
    where = {code: s for s, code in enumerate(T.labels)}
    p = frame.poset
    out = []
    for x in range(frame.n):
        X = to_mask(y for y in range(frame.n) if p.s_refines(y, x))
        if X not in U.codes:
            raise FrameError("{x' | x' ⊑s x} is not admissible; frame must be full or principal")
        out.append(where[U.codes[X]])
    return MorphismSpec(frame, T, tuple(out), "strict", frozenset({"dense", "robust"}))


def eta_F(frame: PossibilityFrame) -> MorphismSpec:
    """x ↦ P(x) = {X ∈ P | x ∈ X}, as a state of the general filter frame of F⋆."""
    U = underlying_bao(frame)
    T = general_filter_frame(U)
    where = {code: s for s, code in enumerate(T.labels)}
    out = []
    for x in range(frame.n):
        least = frame.full_set
        for X in frame.props:
            if X >> x & 1:
                least &= X
        out.append(where[U.codes[least]])
    return MorphismSpec(frame, T, tuple(out), "possibility")


def dual_hom_under(h: MorphismSpec) -> BAOMap:
    """h⋆: G⋆ → F⋆, X' ↦ h⁻¹[X'], for h: F → G."""
    UF, UG = underlying_bao(h.source), underlying_bao(h.target)
    t = {}
    for code, X in UG.labels.items():
        Y = pull(h.mapping, X)
        if Y not in UF.codes:
            raise FrameError("preimage not admissible; input fails pull back")
        t[code] = UF.codes[Y]
    return BAOMap.of(UG, UF, t)


def dual_hom_rela(h: BAOMap) -> MorphismSpec:
    """h♭: A• → A'• for a homomorphism h: A' → A, x ↦ ⋀'{x' | x ≤ h(x')}."""
    A1, A = h.source, h.target
    t = h.as_dict()
    src, tgt = principal_frame(A), principal_frame(A1)
    where = {y: s for s, y in enumerate(tgt.labels)}
    out = []
    for x in src.labels:
        y = A1.meet_all(x1 for x1 in A1.elements if x & ~t[x1] == 0)
        out.append(where[y])
    return MorphismSpec(src, tgt, tuple(out), "p")


def dual_hom_gff(h: BAOMap) -> MorphismSpec:
    """h_gff: A_gff → A'_gff for h: A' → A, a filter F ↦ h⁻¹[F]."""
    A1, A = h.source, h.target
    t = h.as_dict()
    src, tgt = general_filter_frame(A), general_filter_frame(A1)
    where = {up_filter(A1, a): s for s, a in enumerate(tgt.labels)}
    out = []
    for a in src.labels:
        F = up_filter(A, a)
        pre = frozenset(x1 for x1 in A1.elements if t[x1] in F)
        out.append(where[pre])
    return MorphismSpec(src, tgt, tuple(out), "p")


def compose_bao(f: BAOMap, g: BAOMap) -> BAOMap:
    """g ∘ f."""
    tf, tg = f.as_dict(), g.as_dict()
    return BAOMap.of(f.source, g.target, {x: tg[tf[x]] for x in tf})


def identity_bao(b: FiniteBAO) -> BAOMap:
    return BAOMap.of(b, b, {x: x for x in b.elements})


# -------------------------------------------------------------- reflections

def lattice_join(poset: FinitePoset, X: int) -> int:
    """Least upper bound of a nonempty set of states."""
    ub = poset.full
    for x in bits(X):
        ub &= poset.up[x]
    for u in bits(ub):
        if ub & ~poset.up[u] == 0:
            return u
    raise FrameError("set has no least upper bound")


def reflection_map(g: MorphismSpec, kind: str = "rich") -> MorphismSpec:
    """The p-morphism ḡ through which g factors.

    kind "rich": ḡ: (F⋆)• → G, ḡ(X) = ⋁ g[X], with g = ḡ ∘ ζ_F.
    kind "filter": ḡ: (F⋆)_gff → G, ḡ(F) = the x with P(x) = {Y | g⁻¹[Y] ∈ F},
    with g = ḡ ∘ η_F.
    """
    F, G = g.source, g.target
    flags = classify(G)
    U = underlying_bao(F)
    if kind == "rich":
        if not flags["rich"]:
            raise FrameError("target is not rich")
        if not classify(F)["full"]:
            raise FrameError("source must be full for rich reflections")
        T = principal_frame(U)
        out = []
        for code in T.labels:
            X = U.labels[code]
            out.append(lattice_join(G.poset, to_mask(g.mapping[x] for x in bits(X))))
        return MorphismSpec(T, G, tuple(out), "p")
    if kind == "filter":
        if not flags["filter_descriptive"]:
            raise FrameError("target is not filter-descriptive")
        T = general_filter_frame(U)
        at = [frozenset(Y for Y in G.props if Y >> x & 1) for x in range(G.n)]
        out = []
        for a in T.labels:
            want = frozenset(Y for Y in G.props
                             if a & ~U.codes[pull(g.mapping, Y)] == 0)
            hits = [x for x in range(G.n) if at[x] == want]
            if len(hits) != 1:
                raise FrameError("filter transfer did not single out a state")
            out.append(hits[0])
        return MorphismSpec(T, G, tuple(out), "p")
    raise ValueError(f"unknown reflection kind {kind!r}")


# ------------------------------------------------- Lemmon-Scott canonicity

def _dia_seq(b, seq, x):
    for i in reversed(tuple(seq)):
        x = b.dia(i, x)
    return x


def _box_seq(b, seq, x):
    for i in reversed(tuple(seq)):
        x = b.box(i, x)
    return x


def ls_inequality(b: FiniteBAO, schema) -> int | None:
    """First element x with ♦_α■_β x ≰ ■_δ♦_γ x, or None."""
    for x in b.elements:
        lhs = _dia_seq(b, schema.alpha, _box_seq(b, schema.beta, x))
        rhs = _box_seq(b, schema.delta, _dia_seq(b, schema.gamma, x))
        if lhs & ~rhs:
            return x
    return None


def lemmon_scott_filter_canonicity(b: FiniteBAO, schema) -> CheckReport:
    """If the inequality holds in b, both filter frames meet the frame condition."""
    from .correspondence import ls_condition
    _require(b)
    bad = ls_inequality(b, schema)
    if bad is not None:
        return CheckReport.ok("filter canonicity", antecedent=False, witness_element=bad)
    for name, fr in (("A_ff", filter_frame(b)), ("A_gff", general_filter_frame(b))):
        rep = ls_condition(fr, schema, "possibility")
        if not rep.verdict:
            return CheckReport.fail("filter canonicity", rep.witness, f"{name} fails the condition",
                                    antecedent=True)
    return CheckReport.ok("filter canonicity", antecedent=True)
