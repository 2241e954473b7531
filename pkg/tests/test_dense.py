import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pentagon_coloring
from folkman.arrowing import EdgeColoring, verify_coloring
from folkman.dense import (
    Arrowing,
    BudgetExceeded,
    CanonicalSequence,
    KFreeness,
    canonical_sequence,
    complete_host_size,
    dichotomy_check,
    dichotomy_exhaustive,
    dichotomy_sampled,
    is_rho_d_dense,
    kl_construction_params,
    mc_estimate,
    mono_clique_from_canonical,
    random_two_coloring,
    wilson_interval,
)
from folkman.graph import Graph, complete_graph, cycle_graph, empty_graph
from folkman.logint import Verdict


@st.composite
def graphs(draw, min_n=1, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    p = draw(st.sampled_from([0.3, 0.6, 0.85, 1.0]))
    seed = draw(st.integers(0, 2**32))
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, [e for e in pairs if rng.random() < p])


def dense_over_all_sizes(g, rho, d):
    m0 = math.ceil(rho * g.n)
    for m in range(m0, g.n + 1):
        for S in combinations(range(g.n), m):
            e = sum(1 for u, v in combinations(S, 2) if g.adjacent(u, v))
            if 2 * e < d * m * m:
                return False
    return True


# density ------------------------------------------------------------------------


def test_density_examples():
    assert is_rho_d_dense(complete_graph(6), Fraction(1, 2), Fraction(2, 3)).dense
    assert not is_rho_d_dense(empty_graph(6), Fraction(1, 3), Fraction(1, 100)).dense
    c5 = cycle_graph(5)
    assert is_rho_d_dense(c5, Fraction(3, 5), Fraction(2, 9)).dense
    res = is_rho_d_dense(c5, Fraction(3, 5), Fraction(2, 9) + Fraction(1, 10**6))
    assert not res.dense and res.definitive and res.violation_edges == 1


@settings(max_examples=120, deadline=None)
@given(graphs(), st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4)]),
       st.sampled_from([Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]))
def test_checking_only_the_smallest_size_suffices(g, rho, d):
    assert is_rho_d_dense(g, rho, d).dense == dense_over_all_sizes(g, rho, d)


@settings(max_examples=80, deadline=None)
@given(graphs(min_n=4), st.sampled_from([Fraction(1, 4), Fraction(1, 3)]),
       st.sampled_from([Fraction(1, 5), Fraction(2, 5)]), st.sampled_from([Fraction(1, 2), Fraction(2, 3)]),
       st.data())
def test_density_is_hereditary(g, rho, d, c, data):
    if not is_rho_d_dense(g, rho, d).dense:
        return
    size = data.draw(st.integers(math.ceil(c * g.n), g.n))
    S = data.draw(st.lists(st.integers(0, g.n - 1), min_size=size, max_size=size, unique=True))
    sub = g.induced_subgraph(S)
    assert is_rho_d_dense(sub, rho / c, d).dense


def test_sampled_mode_is_one_sided():
    res = is_rho_d_dense(empty_graph(30), Fraction(1, 3), Fraction(1, 2), mode="sampled", seed=1, trials=5)
    assert not res.dense and res.definitive
    res = is_rho_d_dense(complete_graph(30), Fraction(1, 3), Fraction(1, 2), mode="sampled", seed=1, trials=50)
    assert res.dense and not res.definitive
    with pytest.raises(BudgetExceeded):
        is_rho_d_dense(complete_graph(40), Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(ValueError):
        is_rho_d_dense(complete_graph(4), 0, Fraction(1, 2))


def test_complete_host_size_meets_both_hypotheses():
    d = Fraction(9, 10)
    for k, expect in ((3, 45), (4, 220)):
        n = complete_host_size(k, d)
        assert n == expect
        rho = (d / 2) ** (2 * k - 4)
        assert n >= (2 / d) ** (2 * k - 4)
        m = math.ceil(rho * n)
        # every m-subset of K_n has binom(m, 2) edges
        assert 2 * math.comb(m, 2) >= d * m * m
        assert 2 * math.comb(m - 1, 2) < d * (m - 1) ** 2
        prev = math.ceil(rho * (n - 1))
        assert 2 * math.comb(prev, 2) < d * prev * prev


# canonical sequences ------------------------------------------------------------


def test_monochromatic_host_gives_identity_sequence():
    g = complete_graph(4)
    res = canonical_sequence(EdgeColoring(g, (1,) * 6, 2), 4, Fraction(1, 2))
    assert res.sequence.vertices == (0, 1, 2, 3)
    assert res.sequence.forward_colors == (1, 1, 1)


def test_length_two_is_an_adjacent_pair():
    g = complete_graph(6)
    cyc = {frozenset((i, (i + 1) % 5)) for i in range(5)}
    colors = tuple(1 if frozenset(e) in cyc else 2 for e in g.edges())
    res = canonical_sequence(EdgeColoring(g, colors, 2), 2, Fraction(9, 10))
    u, v = res.sequence.vertices
    assert g.adjacent(u, v)


def test_failure_is_reported_with_level():
    k5 = complete_graph(5)
    res = canonical_sequence(EdgeColoring(k5, tuple(pentagon_coloring(k5)), 2), 4, Fraction(9, 10))
    assert not res.ok
    assert res.failed_level == 4 and res.reason
    assert len(res.levels) == 3
    assert not res.hypotheses_held


def test_mono_clique_examples():
    g = complete_graph(4)
    col = EdgeColoring(g, (1,) * 6, 2)
    seq = canonical_sequence(col, 4, Fraction(1, 2)).sequence
    assert mono_clique_from_canonical(seq, col, 3) == (1, (0, 1, 3))
    # forward colours (1, 2, 1)
    fn = {(0, 1): 1, (0, 2): 1, (0, 3): 1, (1, 2): 2, (1, 3): 2, (2, 3): 1}
    col = EdgeColoring.from_function(g, 2, lambda u, v: fn[(u, v)])
    seq = CanonicalSequence((0, 1, 2, 3), (1, 2, 1))
    assert seq.verify(col)
    assert mono_clique_from_canonical(seq, col, 3) == (1, (0, 2, 3))


def test_mono_clique_rejects_malformed():
    g = complete_graph(4)
    col = EdgeColoring(g, (1,) * 6, 2)
    with pytest.raises(ValueError):
        mono_clique_from_canonical(CanonicalSequence((0, 1, 2), (1, 1)), col, 3)
    with pytest.raises(ValueError):
        mono_clique_from_canonical(CanonicalSequence((0, 1, 2, 3), (2, 1, 1)), col, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 4]))
def test_random_canonical_sequences_give_verified_cliques(seed, k):
    g = complete_graph(2 ** (2 * k - 3) + 3)
    col = random_two_coloring(g, seed)
    res = canonical_sequence(col, 2 * k - 2, Fraction(9, 10))
    assert res.ok and res.sequence.verify(col)
    c, verts = mono_clique_from_canonical(res.sequence, col, k)
    sub = g.induced_subgraph(verts)
    sub_colors = [col.color(verts[a], verts[b]) for a, b in sub.edges()]
    assert verify_coloring(sub, sub_colors, k, 2) == (c, tuple(range(k)))


def test_canonical_sequence_argument_checks():
    g = complete_graph(4)
    with pytest.raises(ValueError):
        canonical_sequence(EdgeColoring(g, (1,) * 6, 3), 3, Fraction(1, 2))
    with pytest.raises(ValueError):
        canonical_sequence(EdgeColoring(g, (1,) * 6, 2), 0, Fraction(1, 2))


# dichotomy ----------------------------------------------------------------------


def test_dichotomy_examples():
    k6 = complete_graph(6)
    res = dichotomy_check(6, 3, 2, 6, EdgeColoring(k6, (3,) * 15, 3))
    assert res.last_color_edges == 15 and res.second and res.side in ("Second", "Both")
    res = dichotomy_check(6, 3, 2, 6, EdgeColoring(k6, (1,) * 15, 3))
    assert res.mono_count == 20 and res.first and res.side in ("First", "Both")
    with pytest.raises(ValueError):
        dichotomy_check(5, 3, 2, 6, EdgeColoring(complete_graph(5), (1,) * 10, 3))


def test_exhaustive_counts_match_per_coloring_loop():
    from itertools import product

    n, k, r, R = 4, 3, 1, 4
    g = complete_graph(n)
    tally = {"First": 0, "Second": 0, "Both": 0, "Neither": 0}
    for colors in product((1, 2), repeat=6):
        tally[dichotomy_check(n, k, r, R, EdgeColoring(g, colors, 2)).side] += 1
    s = dichotomy_exhaustive(n, k, r, R)
    assert (s.first_only, s.second_only, s.both, s.neither) == (
        tally["First"], tally["Second"], tally["Both"], tally["Neither"])
    assert s.total == 64


def test_exhaustive_can_find_counterexamples():
    # R = 4 is below R(3;2) = 6: a triangle-free 2-colouring of K4 avoiding colour 3 lands on neither side
    s = dichotomy_exhaustive(4, 3, 2, 4)
    assert s.total == 3**6
    assert s.neither > 0
    g = complete_graph(4)
    assert dichotomy_check(4, 3, 2, 4, EdgeColoring(g, s.counterexample, 3)).side == "Neither"


def test_dichotomy_caps_and_sampling():
    with pytest.raises(BudgetExceeded):
        dichotomy_exhaustive(7, 3, 2, 6)
    a = dichotomy_sampled(7, 3, 2, 6, 500, seed=9)
    b = dichotomy_sampled(7, 3, 2, 6, 500, seed=9)
    assert a.to_json() | {"runtime_ms": 0} == b.to_json() | {"runtime_ms": 0}
    assert a.total == 500 and not a.exhaustive


# construction parameters --------------------------------------------------------


def test_kl_params_alpha_to_zero():
    kp = kl_construction_params(3, Fraction(1, 10**12))
    assert abs(float(kp.log2n) - 12) < 1e-9
    assert abs(float(kp.log2p) + 0.75) < 1e-9
    assert abs(kp.p.log2_mid() + 0.75) < 1e-9


def test_p_simplification_symbolic():
    a, k = sympy.symbols("alpha k", positive=True)
    log2n = 4 * k / (1 - 4 * a)
    log2p = 1 - log2n * (7 + 4 * a) / (16 * k)
    assert sympy.simplify(log2p - (-(20 * a + 3) / (4 * (1 - 4 * a)))) == 0
    for kk, aa in ((3, Fraction(1, 10)), (7, Fraction(1, 5)), (30, Fraction(3, 13))):
        kp = kl_construction_params(kk, aa)
        assert kp.log2p == kp.log2p_simplified
        assert kp.clique_threshold() == Fraction(16 * kk) / (20 * aa + 3)


def test_expected_cliques_vanish_past_threshold():
    kp = kl_construction_params(30, Fraction(1, 5))
    l = kp.min_clique_size()
    assert Fraction(l - 1, 2) >= kp.clique_threshold()
    assert kp.expected_cliques(l).hi < 0
    assert kp.expected_cliques(3).lo > 0


def test_chernoff_and_rho():
    kp = kl_construction_params(3, Fraction(1, 10))
    v = kp.chernoff_bound(100, Fraction(1, 10))
    p = 2 ** float(kp.log2p)
    expect = math.exp(-(0.01 / 24) * p * 100**2)
    assert abs(2 ** v.log2_mid() - expect) < 1e-12
    assert abs(kp.rho.log2_mid() - (2 * math.log2(float(kp.log2n)) - float(kp.log2n))) < 1e-9


def test_density_hypotheses_report_both_forms():
    rep = kl_construction_params(30, Fraction(1, 5)).density_hypotheses()
    assert rep["exact"]["exponent"] == 56 and rep["simplified"]["exponent"] == 60
    for form in rep.values():
        assert form["n_large_enough"] in {v.value for v in Verdict}


def test_kl_argument_checks():
    with pytest.raises(ValueError):
        kl_construction_params(3, Fraction(1, 4))
    with pytest.raises(ValueError):
        kl_construction_params(2, Fraction(1, 10))


# Monte Carlo --------------------------------------------------------------------


def test_wilson_interval_formula():
    x, n, z = 37, 120, 1.959963984540054
    ph = x / n
    centre = (ph + z * z / (2 * n)) / (1 + z * z / n)
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    lo, hi = wilson_interval(x, n)
    assert abs(lo - (centre - half)) < 1e-9 and abs(hi - (centre + half)) < 1e-9


def test_mc_trivial_events():
    r = mc_estimate(KFreeness(12, 0.0, 3), 50, seed=1)
    assert r.estimate == 1.0 and r.successes == 50
    r = mc_estimate(Arrowing(6, 1.0, 3, 2), 10, seed=1)
    assert r.estimate == 1.0 and not r.partial


def test_mc_deterministic_and_schedule_independent():
    a = mc_estimate(KFreeness(20, 0.3, 3), 200, seed=5)
    b = mc_estimate(KFreeness(20, 0.3, 3), 200, seed=5, n_jobs=2)
    assert (a.successes, a.ci95) == (b.successes, b.ci95)
    c = mc_estimate(KFreeness(20, 0.3, 3), 200, seed=6)
    assert set(a.to_json()) >= {"experiment", "params", "seed", "trials", "estimate", "ci95", "runtime_ms"}
    assert c.successes != a.successes or c.seed != a.seed


def test_mc_budget_marks_partial():
    r = mc_estimate(Arrowing(8, 1.0, 3, 3, node_budget=1), 3, seed=0)
    assert r.partial and r.undecided == 3 and math.isnan(r.estimate)
