import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from possibility.enumeration import enumerate_full_frames, random_frame, random_kripke_frame
from possibility.forcing import (BudgetExceeded, FamilyBatch, Model, Program, UnboundSymbol,
                                 forces, kripke_forces, kripke_truth_set, kripke_valid,
                                 load_battery, satisfiable, truth_set, truth_sets, valid_on_frame,
                                 valid_set)
from possibility.formula import (Box, Dia, Neg, Top, Var, negative_translation, parse, substitute)
from possibility.frame import (FrameError, kripke_frame, members, to_mask)
from possibility.transform import powerset_possibilization, powerset_state
from strategies import formulas

p1 = Var("p1")


def random_model(seed, max_states=5):
    frame = random_frame(seed, max_states)
    rng = random.Random(seed)
    val = {v: rng.choice(frame.props) for v in ("p1", "p2", "q")}
    return Model(frame, val)


def test_forcing_examples(corpus):
    chain2 = corpus["chain2"]
    assert forces(Model(chain2, {"p1": 0b11}), 1, p1)
    fig11 = corpus["fig11"]
    M = Model(fig11, {"p1": 0b0010})
    assert forces(M, 0, Dia("i", p1))
    assert not forces(M, 0, Box("i", p1))
    assert truth_set(Model(fig11, {"p1": 0b0110}), Neg(p1)) == 0b1000
    assert truth_set(M, Top) == fig11.full_set


def test_model_rejects_inadmissible_value(corpus):
    with pytest.raises(FrameError):
        Model(corpus["chain2"], {"p1": 0b01})


def test_unbound_symbols(corpus):
    M = Model(corpus["fig11"], {"p1": 0})
    with pytest.raises(UnboundSymbol):
        truth_set(M, Var("p9"))
    with pytest.raises(UnboundSymbol):
        truth_set(M, Box("k", p1))


def test_validity_examples(corpus):
    K = parse("[i](p1 -> p2) -> ([i]p1 -> [i]p2)")
    for frame in corpus.values():
        if "i" in frame.indices:
            assert valid_on_frame(frame, K).verdict
    lonely = kripke_frame(1, {"i": []})
    rep = valid_on_frame(lonely, parse("[i]p1 -> <i>p1"))
    assert not rep.verdict and rep.witness == (0,)
    assert rep.data["valuation"] == {"p1": ()}


def test_countermodel_is_lexicographically_first(corpus):
    fig11 = corpus["fig11"]
    rep = valid_on_frame(fig11, parse("p1"))
    assert rep.data["valuation"] == {"p1": ()} and rep.witness == (0,)
    rep = valid_on_frame(fig11, parse("p1 -> p2"))
    assert not rep.verdict
    # p1 = {b1}, p2 = ∅ is the first failing valuation; a lies above b1 so it fails first
    assert rep.data["valuation"] == {"p1": (1,), "p2": ()} and rep.witness == (0,)


def test_p3_matches_kripke_source_on_battery(corpus):
    world = kripke_frame(2, {"i": [(0, 0), (0, 1), (1, 0), (1, 1)]})
    P3 = corpus["p3"]
    for f in load_battery():
        assert valid_on_frame(P3, f).verdict == kripke_valid(world, f).verdict, f


def test_kripke_examples():
    refl = kripke_frame(1, {"i": [(0, 0)]})
    assert kripke_valid(refl, parse("[i]p1 -> p1")).verdict
    cyc = kripke_frame(2, {"i": [(0, 1), (1, 0)]})
    rep = kripke_valid(cyc, parse("[i]p1 -> [i][i]p1"))
    assert not rep.verdict
    val = {k: to_mask(v) for k, v in rep.data["valuation"].items()}
    w = rep.witness[0]
    assert not kripke_forces(cyc, val, w, parse("[i]p1 -> [i][i]p1"))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), formulas(names=("p1", "p2"), indices=("i",)))
def test_discrete_forcing_is_classical(seed, f):
    frame = random_kripke_frame(seed, 3)
    rng = random.Random(seed)
    val = {v: rng.randrange(1 << frame.n) for v in ("p1", "p2")}
    M = Model(frame, val)
    assert truth_set(M, f) == kripke_truth_set(frame, val, f)
    for w in range(frame.n):
        assert kripke_forces(frame, val, w, f) == bool(kripke_truth_set(frame, val, f) >> w & 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), formulas(indices=("i",)))
def test_truth_sets_match_naive_forcing(seed, f):
    M = random_model(seed)
    N = oracle.from_library(M.frame)
    val = {k: frozenset(members(v)) for k, v in M.valuation.items()}
    assert truth_set(M, f) == oracle.to_mask(oracle.truth_set(N, val, f))
    assert all(forces(M, x, f) == (x in oracle.truth_set(N, val, f)) for x in range(M.frame.n))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), formulas(indices=("i",)))
def test_persistence_refinability_admissibility(seed, f):
    M = random_model(seed)
    p = M.frame.poset
    X = truth_set(M, f)
    assert X in M.frame.prop_set
    notX = truth_set(M, Neg(f))
    for x in range(p.n):
        if X >> x & 1:
            assert p.down[x] & ~X == 0
        else:
            assert p.down[x] & notX


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 6), formulas(indices=("i",)))
def test_double_negation_and_negative_translation(seed, f):
    M = random_model(seed)
    assert truth_set(M, Neg(Neg(f))) == truth_set(M, f)
    assert truth_set(M, negative_translation(f)) == truth_set(M, f)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6), formulas(indices=("i",)))
def test_separative_duplicates_force_alike(seed, f):
    M = random_model(seed)
    p = M.frame.poset
    X = truth_set(M, f)
    for x in range(p.n):
        for y in range(p.n):
            if p.s_refines(x, y) and p.s_refines(y, x):
                assert (X >> x & 1) == (X >> y & 1)


def test_iterated_diamonds_on_standard_frames():
    from possibility.frame import violation
    frames = [f for f in enumerate_full_frames(3) if violation(f.poset, f.rels["i"], "R-down") is None]
    for frame in frames:
        R = frame.rels["i"]
        for X in frame.props:
            M = Model(frame, {"p1": X})
            for n in (1, 2, 3):
                f = p1
                for _ in range(n):
                    f = Dia("i", f)
                reach = [X]
                for _ in range(n):
                    prev = reach[-1]
                    reach.append(to_mask(x for x in range(frame.n) if R[x] & prev))
                want = to_mask(x for x in range(frame.n)
                               if frame.poset.down[x] & ~reach[-1] == 0)
                assert truth_set(M, f) == want
                boxed = truth_set(M, Box("i", f))
                assert boxed == to_mask(x for x in range(frame.n) if R[x] & ~reach[-1] == 0)


def test_possibilization_pointwise():
    rng = random.Random(7)
    for _ in range(40):
        world = random_kripke_frame(rng.randrange(10 ** 6), 3)
        P = powerset_possibilization(world)
        val = {"p1": rng.randrange(1 << world.n), "p2": rng.randrange(1 << world.n)}
        from possibility.transform import possibilize_valuation
        M = Model(P, possibilize_valuation(val))
        for f in load_battery()[:60]:
            T = kripke_truth_set(world, val, f)
            for W in range(1, 1 << world.n):
                assert forces(M, powerset_state(W), f) == (W & ~T == 0)


def test_validity_closed_under_substitution():
    rng = random.Random(3)
    battery = load_battery()
    for seed in range(25):
        frame = random_frame(seed, 4)
        valid = [f for f in battery if valid_on_frame(frame, f).verdict and "p2" not in str(f)]
        for f in valid[:6]:
            g = substitute(f, {"p1": rng.choice(battery[:30])})
            assert valid_on_frame(frame, g).verdict


def test_valid_set_and_satisfiable_agree(corpus):
    battery = load_battery()
    for frame in (corpus["fig11"], corpus["p3"], corpus["fig12_left"]):
        vs = valid_set(frame, battery)
        assert vs == [valid_on_frame(frame, f).verdict for f in battery]
        for f in battery[:40]:
            # some state forces f exactly when ¬f is not valid
            assert satisfiable(frame, f) == (not valid_on_frame(frame, Neg(f)).verdict)


def test_budget_is_enforced(corpus):
    with pytest.raises(BudgetExceeded):
        valid_on_frame(corpus["fig13"], parse("p1 & p2 & q & p3 & p4 & p5 & p6 & p7"), budget=1000)


def test_batch_matches_per_model_evaluation():
    battery = load_battery()
    prog = Program(battery)
    names = [v for v in prog.variables if v != "#v"]
    import numpy as np
    frames = [f for n in (1, 2, 3) for f in enumerate_full_frames(n)]
    by_poset = {}
    for f in frames:
        by_poset.setdefault(f.poset, []).append(f)
    for p, fs in by_poset.items():
        batch = FamilyBatch(p, fs[0].props)
        tables = {"i": np.stack([batch.box_table(f, "i") for f in fs])}
        roots = batch.run(prog, tables)
        for k, f in enumerate(fs[::7]):
            k *= 7
            for v, choice in enumerate(itertools.product(f.props, repeat=len(names))):
                sets = truth_sets(Model(f, dict(zip(names, choice))), battery)
                for r, X in zip(roots, sets):
                    code = r[k if r.shape[0] > 1 else 0, v if r.shape[1] > 1 else 0]
                    assert f.props[code] == X
