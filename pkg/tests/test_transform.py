import random

import pytest

from possibility.bao import bao_isomorphism, product, underlying_bao
from possibility.enumeration import enumerate_full_frames, random_frame, random_kripke_frame
from possibility.forcing import Model, load_battery, truth_set, valid_set
from possibility.frame import (FrameError, classify, kripke_frame, validate_frame)
from possibility.morphism import MorphismSpec, are_isomorphic, check_morphism
from possibility.transform import (atom_structure, box_tighten, disjoint_union, extend_bot,
                                   extend_valuation, functionalize, powerset_possibilization,
                                   restrict_bot, separative_quotient, subframe,
                                   tighten)

BATTERY = load_battery()
UNIVERSAL2 = kripke_frame(2, {"i": [(a, b) for a in range(2) for b in range(2)]})


def same_validity(F, G, battery=BATTERY):
    return valid_set(F, battery) == valid_set(G, battery)


def sample_frames(count=30, max_states=4, seed=0):
    rng = random.Random(seed)
    return [random_frame(rng.randrange(10 ** 9), max_states) for _ in range(count)]


# ------------------------------------------------------------ possibilization

def test_possibilization_of_universal_pair_is_p3(corpus):
    P = powerset_possibilization(UNIVERSAL2)
    assert P.n == 3 and len(P.props) == 4
    assert are_isomorphic(P, corpus["p3"]) is not None
    flags = classify(P)
    assert flags["atomic"] and flags["rich"]


def test_possibilization_of_reflexive_point():
    P = powerset_possibilization(kripke_frame(1, {"i": [(0, 0)]}))
    assert P.n == 1 and set(P.props) == {0, 1}


def test_possibilization_needs_world_frame(corpus):
    with pytest.raises(FrameError):
        powerset_possibilization(corpus["fig11"])


def test_possibilization_preserves_satisfiability():
    rng = random.Random(11)
    for _ in range(15):
        world = random_kripke_frame(rng.randrange(10 ** 9), 3)
        P = powerset_possibilization(world)
        assert validate_frame(P).verdict
        assert classify(P)["rich"]
        assert same_validity(world, P)
        F, _ = atom_structure(P)
        assert are_isomorphic(F, world) is not None


# ---------------------------------------------------------------- F□

def test_box_tighten_universal_stays_universal(corpus):
    fig11 = corpus["fig11"]
    assert box_tighten(fig11).rels == fig11.rels


def test_box_tighten_rejects_invalid_frame(corpus):
    fig11 = corpus["fig11"]
    bad = fig11.with_relations({"i": (0b0010, 0, 0, 0)})
    with pytest.raises(FrameError):
        box_tighten(bad)


def test_box_tighten_world_frames_fixed():
    for seed in range(20):
        w = random_kripke_frame(seed, 3)
        assert box_tighten(w).rels == w.rels


def test_box_tighten_properties():
    for F in sample_frames(40):
        G = box_tighten(F)
        assert validate_frame(G).verdict
        flags = classify(G)
        assert flags["r_tight"]
        if classify(F)["full"]:
            assert flags["strong"] and flags["full"]
        assert box_tighten(G).rels == G.rels
        rng = random.Random(F.n)
        val = {v: rng.choice(F.props) for v in ("p1", "p2")}
        for f in BATTERY[::5]:
            assert truth_set(Model(F, val), f) == truth_set(Model(G, val), f)
        # identity is a surjective robust possibility morphism F -> F□
        spec = MorphismSpec(F, G, tuple(range(F.n)), "possibility", {"robust"})
        assert check_morphism(spec).verdict


# ----------------------------------------------------------- quotients

def test_separative_quotient_of_fig10(corpus):
    Q, h = separative_quotient(corpus["fig10"])
    assert Q.n == 3
    assert are_isomorphic(Q, corpus["fig10_quotient"]) is not None
    assert check_morphism(MorphismSpec(corpus["fig10"], Q, h, "possibility", {"robust"})).verdict
    assert same_validity(corpus["fig10"], Q)


def test_separative_quotient_properties():
    for F in sample_frames(40, seed=1):
        Q, h = separative_quotient(F)
        assert validate_frame(Q).verdict and classify(Q)["separative"]
        assert set(h) == set(range(Q.n))
        assert check_morphism(MorphismSpec(F, Q, h, "possibility", {"robust"})).verdict
        if classify(F)["full"]:
            assert classify(Q)["full"]
        if classify(F)["separative"]:
            assert are_isomorphic(F, Q) is not None
        assert same_validity(F, Q, BATTERY[::3])


def test_tighten_fig12(corpus):
    T, h = tighten(corpus["fig12_left"])
    assert h == (0, 1, 2, 3, 3, 4)
    assert are_isomorphic(T, corpus["fig12_right"]) is not None
    assert classify(T)["tight"] and not classify(corpus["fig12_left"])["tight"]
    assert same_validity(corpus["fig12_left"], T)


def test_tighten_properties():
    for F in sample_frames(40, seed=2):
        T, h = tighten(F)
        assert validate_frame(T).verdict and classify(T)["tight"]
        assert check_morphism(MorphismSpec(F, T, h, "possibility", {"robust"})).verdict
        if classify(F)["tight"]:
            assert are_isomorphic(F, T) is not None
        assert same_validity(F, T, BATTERY[::3])


# ------------------------------------------------------------ functional

def test_functionalize_p3(corpus):
    G = functionalize(corpus["p3"])
    assert G.rels["i"] == (0b100, 0b100, 0b100)


def test_functionalize_universal_fig11(corpus):
    G = functionalize(corpus["fig11"])
    assert G.rels["i"] == (1,) * 4


def test_functionalize_fixed_on_functional_frames(corpus):
    G = functionalize(corpus["p3"])
    assert functionalize(G).rels == G.rels


def test_functionalize_rejects_missing_max(corpus):
    fig11 = corpus["fig11"]
    # R(x) = {b1, b2} has no maximum
    two = fig11.with_relations({"i": (0b0110,) * 4})
    with pytest.raises(FrameError):
        functionalize(two)


def test_functionalize_preserves_truth():
    from possibility.frame import violation
    seen = 0
    for F in enumerate_full_frames(3):
        if violation(F.poset, F.rels["i"], "R-max") is not None:
            continue
        G = functionalize(F)
        seen += 1
        assert validate_frame(G).verdict
        for X in F.props:
            for f in BATTERY[::4]:
                assert truth_set(Model(F, {"p1": X, "p2": X}), f) == truth_set(Model(G, {"p1": X, "p2": X}), f)
    assert seen > 0


# ------------------------------------------------------------ atoms

def test_atom_structure_of_p3(corpus):
    A, incl = atom_structure(corpus["p3"])
    assert are_isomorphic(A, UNIVERSAL2) is not None
    spec = MorphismSpec(A, corpus["p3"], incl, "possibility", {"dense", "strong_embedding"})
    assert check_morphism(spec).verdict


def test_atom_structure_of_fig11(corpus):
    A, incl = atom_structure(corpus["fig11"])
    assert A.n == 3 and incl == (1, 2, 3)
    assert A.rels["i"] == (0b111,) * 3
    assert same_validity(corpus["fig11"], A)


def test_atom_structure_properties():
    for F in sample_frames(40, seed=3):
        A, incl = atom_structure(F)
        assert validate_frame(A).verdict
        if classify(F)["full"]:
            assert classify(A)["full"]
        assert check_morphism(MorphismSpec(A, F, incl, "possibility", {"dense"})).verdict
        # R' is the restriction of R only when R-down holds
        if classify(F)["standard"]:
            assert check_morphism(MorphismSpec(A, F, incl, "possibility",
                                               {"dense", "strong_embedding"})).verdict
        assert same_validity(F, A, BATTERY[::3])
        # x ↦ atoms below x, into the possibilization of the atom structure
        P = powerset_possibilization(A)
        pos = {a: k for k, a in enumerate(incl)}
        h = tuple(sum(1 << pos[a] for a in incl if F.poset.leq(a, x)) - 1 for x in range(F.n))
        assert check_morphism(MorphismSpec(F, P, h, "possibility", {"dense", "robust"})).verdict


def test_atomic_rich_frames_rebuild():
    for F in enumerate_full_frames(3):
        if classify(F)["rich"]:
            A, _ = atom_structure(F)
            assert are_isomorphic(powerset_possibilization(A), F) is not None


# ------------------------------------------------------------ unions

def test_union_of_two_chains(corpus):
    U, embeds = disjoint_union([corpus["chain2"], corpus["chain2"]])
    assert U.n == 4 and len(U.props) == 4
    assert embeds == [(0, 1), (2, 3)]


def test_single_union_is_summand(corpus):
    U, _ = disjoint_union([corpus["fig11"]])
    assert are_isomorphic(U, corpus["fig11"]) is not None


def test_union_rejects_index_mismatch(corpus):
    with pytest.raises(FrameError):
        disjoint_union([corpus["fig11"], corpus["bimodal_vee"]])
    with pytest.raises(FrameError):
        disjoint_union([])


def test_union_validity_and_dual():
    rng = random.Random(5)
    for _ in range(12):
        parts = [random_frame(rng.randrange(10 ** 9), 3) for _ in range(2)]
        U, _ = disjoint_union(parts)
        assert validate_frame(U).verdict
        vs = [valid_set(F, BATTERY) for F in parts]
        assert valid_set(U, BATTERY) == [a and b for a, b in zip(*vs)]
        lhs = underlying_bao(U)
        rhs = product([underlying_bao(F) for F in parts])
        assert bao_isomorphism(lhs, rhs) is not None


# ------------------------------------------------------------ subframes

def test_fig13_selective_not_generated(corpus):
    S, kind, keep = subframe(corpus["fig13"], [0, 3, 4, 5, 6])
    assert kind == "selective"
    assert are_isomorphic(S, corpus["fig13_selective"]) is not None
    assert validate_frame(S).verdict and classify(S)["full"]


def test_generated_subframe(corpus):
    F = corpus["fig13"]
    _, kind, _ = subframe(F, list(range(F.n)))
    assert kind == "generated"
    with pytest.raises(FrameError):
        subframe(F, 0)


def test_selective_subframes_anti_preserve_validity():
    checked = 0
    for F in sample_frames(25, seed=4):
        vs = valid_set(F, BATTERY[::2])
        for mask in range(1, 1 << F.n):
            S, kind, _ = subframe(F, mask)
            if kind == "neither":
                continue
            checked += 1
            assert validate_frame(S).verdict
            if classify(F)["full"]:
                assert classify(S)["full"]
            sv = valid_set(S, BATTERY[::2])
            assert all(b for a, b in zip(vs, sv) if a)
    assert checked > 0


# ------------------------------------------------------------ extended frames

def test_extend_chain2(corpus):
    E = extend_bot(corpus["chain2"])
    assert E.n == 3 and E.extended
    assert set(E.props) == {0b001, 0b111}
    assert validate_frame(E).verdict


def test_extend_restrict_round_trip():
    for F in sample_frames(20, seed=6):
        E = extend_bot(F)
        assert validate_frame(E).verdict
        assert are_isomorphic(restrict_bot(E), F) is not None
        rng = random.Random(F.n)
        val = {v: rng.choice(F.props) for v in ("p1", "p2")}
        for f in BATTERY[::7]:
            X = truth_set(Model(E, extend_valuation(val)), f)
            assert X & 1
            assert X >> 1 == truth_set(Model(F, val), f)


def test_restrict_requires_extended(corpus):
    with pytest.raises(FrameError):
        restrict_bot(corpus["fig11"])
