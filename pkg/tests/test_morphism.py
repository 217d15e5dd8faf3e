import itertools
import random

import pytest

from possibility.enumeration import enumerate_full_frames, random_frame
from possibility.forcing import load_battery, valid_set
from possibility.frame import (FinitePoset, PossibilityFrame, classify, to_mask)
from possibility.morphism import (FrameMismatch, MorphismSpec, SearchBudgetExceeded,
                                  are_isomorphic, check_clause, check_morphism, compose,
                                  find_morphism, identity, iter_morphisms, r_back_by_closure)
from possibility.transform import box_tighten

BATTERY = load_battery()[::2]


def relabel(F, perm):
    """Frame with state x renamed perm[x]."""
    n = F.n
    inv = [0] * n
    for x, y in enumerate(perm):
        inv[y] = x

    def move(X):
        return to_mask(perm[x] for x in range(n) if X >> x & 1)

    poset = FinitePoset(n, down=[move(F.poset.down[inv[y]]) for y in range(n)])
    rels = {i: tuple(move(s[inv[y]]) for y in range(n)) for i, s in F.rels.items()}
    return PossibilityFrame(poset, rels, {move(X) for X in F.props})


@pytest.fixture(scope="module")
def small_frames():
    rng = random.Random(21)
    fs = [f for n in (1, 2) for f in enumerate_full_frames(n)]
    fs += [random_frame(rng.randrange(10 ** 9), 3) for _ in range(14)]
    return fs


@pytest.fixture(scope="module")
def found(small_frames):
    """Every possibility morphism between pairs of small frames."""
    out = []
    for F, G in itertools.product(small_frames, repeat=2):
        if G.n ** F.n <= 27:
            out.extend(iter_morphisms(F, G, "possibility"))
    return out


def test_spec_validation(corpus):
    F = corpus["fig11"]
    with pytest.raises(ValueError):
        MorphismSpec(F, F, (0, 1, 2))
    with pytest.raises(ValueError):
        MorphismSpec(F, F, (0, 1, 2, 7))
    with pytest.raises(ValueError):
        MorphismSpec(F, F, (0, 1, 2, 3), "loose")
    with pytest.raises(ValueError):
        MorphismSpec(F, F, (0, 1, 2, 3), flags={"sticky"})


def test_identity_checks_at_every_grade(corpus):
    for F in corpus.values():
        if F.extended:
            continue
        for grade in ("possibility", "strict", "p"):
            assert check_morphism(identity(F, grade, {"dense", "robust", "isomorphism"})).verdict


def test_find_identity_isomorphism(corpus):
    spec = find_morphism(corpus["p3"], corpus["p3"], "p", {"isomorphism"})
    assert spec.mapping == (0, 1, 2)


def test_identity_into_box_tightening_is_robust():
    hits = 0
    for seed in range(60):
        F = random_frame(seed, 4)
        G = box_tighten(F)
        if G.rels != F.rels:
            hits += 1
        spec = MorphismSpec(F, G, tuple(range(F.n)), "possibility", {"robust"})
        assert check_morphism(spec).verdict
    assert hits > 0


def test_fig11_onto_trivial_chain(corpus):
    fig11 = corpus["fig11"]
    chain = PossibilityFrame(FinitePoset.chain(2), {"i": (0b11, 0b11)}, {0, 0b11})
    spec = find_morphism(fig11, chain, "possibility", {"dense"})
    assert spec is not None
    assert spec.mapping == (0, 0, 0, 0)
    vs, vt = valid_set(fig11, BATTERY), valid_set(chain, BATTERY)
    assert all(b for a, b in zip(vs, vt) if a)


def test_find_returns_lexicographically_least(small_frames):
    for F, G in itertools.product(small_frames[:12], repeat=2):
        if G.n ** F.n > 27:
            continue
        every = list(iter_morphisms(F, G, "possibility"))
        got = find_morphism(F, G, "possibility")
        assert (got.mapping if got else None) == (every[0].mapping if every else None)


def test_search_budget(corpus):
    F = corpus["fig13"]
    with pytest.raises(SearchBudgetExceeded):
        find_morphism(F, F, "p", {"isomorphism"}, node_limit=3)


def test_index_mismatch(corpus):
    with pytest.raises(FrameMismatch):
        find_morphism(corpus["fig11"], corpus["bimodal_vee"])


def test_relabelled_frames_are_isomorphic(corpus):
    rng = random.Random(2)
    for name in ("fig11", "fig13", "fig12_left", "bimodal_vee"):
        F = corpus[name]
        perm = list(range(F.n))
        rng.shuffle(perm)
        G = relabel(F, perm)
        h = are_isomorphic(F, G)
        assert h is not None
        assert check_morphism(MorphismSpec(F, G, h, "p", {"isomorphism"})).verdict


def test_different_sizes_not_isomorphic(corpus):
    assert are_isomorphic(corpus["fig11"], corpus["p3"]) is None


def test_composition(found):
    by_source = {}
    for f in found:
        by_source.setdefault(f.source, []).append(f)
    pairs = 0
    for f in found[:400]:
        for g in by_source.get(f.target, [])[:10]:
            gf = compose(f, g)
            assert check_morphism(gf).verdict
            pairs += 1
            for grade in ("strict", "p"):
                fs = MorphismSpec(f.source, f.target, f.mapping, grade)
                gs = MorphismSpec(g.source, g.target, g.mapping, grade)
                if check_morphism(fs).verdict and check_morphism(gs).verdict:
                    assert check_morphism(compose(fs, gs)).verdict
        assert compose(identity(f.source, "possibility"), f).mapping == f.mapping
        assert compose(f, identity(f.target, "possibility")).mapping == f.mapping
    assert pairs > 0


def test_compose_requires_matching_frames(corpus):
    a = identity(corpus["fig11"])
    b = identity(corpus["p3"])
    with pytest.raises(FrameMismatch):
        compose(a, b)


def test_preservation_of_validity(found):
    cache = {}

    def vs(F):
        if F not in cache:
            cache[F] = valid_set(F, BATTERY)
        return cache[F]

    dense = robust = 0
    for spec in found:
        F, G, h = spec.source, spec.target, spec.mapping
        if check_clause(F, G, h, "dense") is None:
            dense += 1
            assert all(b for a, b in zip(vs(F), vs(G)) if a)
        if check_clause(F, G, h, "robust") is None:
            robust += 1
            assert all(a for a, b in zip(vs(F), vs(G)) if b)
    assert dense and robust


def test_strict_clauses_imply_matching(small_frames):
    for F, G in itertools.product(small_frames, repeat=2):
        if G.n ** F.n > 27:
            continue
        for h in itertools.product(range(G.n), repeat=F.n):
            strict = all(check_clause(F, G, h, c) is None
                         for c in ("⊑-forth", "⊑-back", "R-forth", "R-back"))
            if strict:
                assert check_clause(F, G, h, "⊑-matching") is None
                assert check_clause(F, G, h, "R-matching") is None
            if classify(F)["full"] and all(check_clause(F, G, h, c) is None
                                           for c in ("⊑-forth", "⊑-back")):
                assert check_clause(F, G, h, "pull back") is None


def test_r_back_closure_form(small_frames):
    for F, G in itertools.product(small_frames, repeat=2):
        if G.n ** F.n > 27:
            continue
        for h in itertools.product(range(G.n), repeat=F.n):
            assert (check_clause(F, G, h, "R-back") is None) == r_back_by_closure(F, G, h, "i")


def test_upgrades_to_stronger_grades(found):
    flags = {}

    def cl(F):
        if F not in flags:
            flags[F] = classify(F)
        return flags[F]

    for spec in found:
        F, G = spec.source, spec.target
        t = cl(G)
        if t["full"] and t["separative"] and t["strong"]:
            assert check_morphism(MorphismSpec(F, G, spec.mapping, "strict")).verdict
        if (cl(F)["rich"] and t["rich"]) or (cl(F)["filter_descriptive"] and t["filter_descriptive"]):
            assert check_morphism(MorphismSpec(F, G, spec.mapping, "p")).verdict
