import json
from itertools import combinations, product

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import pentagon_coloring
from folkman.arrowing import (
    ArrowCertificate,
    ColoringError,
    EdgeColoring,
    Outcome,
    arrows,
    brute_force_arrows,
    is_folkman,
    verify_coloring,
)
from folkman.graph import Graph, complete_graph, cycle_graph, empty_graph, graham_graph


def enumeration_oracle(g, k, r):
    """Plain itertools loop over every colouring; independent of the numpy brute force."""
    edges = g.edges()
    idx = g.edge_index
    cliques = [[idx[e] for e in combinations(q, 2)] for q in combinations(range(g.n), k)
               if all(g.adjacent(u, v) for u, v in combinations(q, 2))]
    for col in product(range(r), repeat=len(edges)):
        if not any(len({col[i] for i in q}) == 1 for q in cliques):
            return False
    return True


@st.composite
def small_graphs(draw, max_n=7, max_edges=12):
    n = draw(st.integers(2, max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=max_edges))
    return Graph.from_edges(n, chosen)


def test_verify_coloring_examples():
    k6 = complete_graph(6)
    hit = verify_coloring(k6, [1] * 15, 3)
    assert hit is not None and hit[0] == 1 and k6.is_clique(hit[1])
    k5 = complete_graph(5)
    assert verify_coloring(k5, pentagon_coloring(k5), 3) is None
    assert verify_coloring(empty_graph(4), [], 3) is None


def test_coloring_validation():
    with pytest.raises(ColoringError):
        EdgeColoring(complete_graph(3), (1, 2), 2)
    with pytest.raises(ColoringError):
        EdgeColoring(complete_graph(3), (1, 2, 3), 2)


def test_k6_arrows_and_k5_does_not():
    c6 = arrows(complete_graph(6), 3, 2)
    assert c6.verdict is Outcome.ARROWS and c6.witness is None
    c5 = arrows(complete_graph(5), 3, 2)
    assert c5.verdict is Outcome.NON_ARROWING
    assert verify_coloring(complete_graph(5), c5.witness, 3) is None
    # a proper 2-colouring of K5 has each class a 5-cycle
    for c in (1, 2):
        cls = c5.witness.color_class(c)
        assert cls.edge_count() == 5 and all(cls.degree(v) == 2 for v in range(5))
    assert brute_force_arrows(complete_graph(6), 3, 2)[0] is True
    assert brute_force_arrows(complete_graph(5), 3, 2)[0] is False


def test_edgeless_graph_does_not_arrow():
    c = arrows(empty_graph(5), 3, 2)
    assert c.verdict is Outcome.NON_ARROWING and c.witness.colors == ()


def test_k2_target_and_argument_checks():
    assert arrows(cycle_graph(5), 2, 3).verdict is Outcome.ARROWS
    assert arrows(empty_graph(3), 2, 2).verdict is Outcome.NON_ARROWING
    with pytest.raises(ValueError):
        arrows(complete_graph(3), 1, 2)
    with pytest.raises(ValueError):
        arrows(complete_graph(3), 3, 2, mode="fast")


def test_witness_starts_with_colour_one():
    for g in (complete_graph(5), cycle_graph(7), graham_graph().remove_edges([(0, 1), (0, 2)])):
        c = arrows(g, 3, 3)
        if c.witness is not None and c.witness.colors:
            assert c.witness.colors[0] == 1


def test_graham_graph_is_folkman():
    b = is_folkman(graham_graph(), 3, 2, l=6)
    assert b.holds is True
    assert b.arrow.verdict is Outcome.ARROWS and not b.has_forbidden_clique
    assert b.clique_number == 5


def test_folkman_negative_cases():
    b = is_folkman(complete_graph(6), 3, 2, l=6)
    assert b.holds is False and b.has_forbidden_clique
    b = is_folkman(cycle_graph(5), 3, 2, l=4)
    assert b.holds is False and b.arrow.verdict is Outcome.NON_ARROWING


def test_budget_gives_indeterminate(monkeypatch):
    c = arrows(graham_graph(), 3, 2, node_budget=5)
    assert c.verdict is Outcome.INDETERMINATE and c.stats.budget_hit
    monkeypatch.setenv("FOLKMAN_NODE_BUDGET", "5")
    assert arrows(graham_graph(), 3, 2).verdict is Outcome.INDETERMINATE
    assert is_folkman(graham_graph(), 3, 2, l=6).holds is None


def test_parallel_matches_deterministic():
    for g in (complete_graph(6), complete_graph(5), graham_graph(), graham_graph().remove_edges([(0, 1)])):
        d = arrows(g, 3, 2)
        p = arrows(g, 3, 2, mode="parallel", n_jobs=2)
        assert d.verdict is p.verdict
        if p.witness is not None:
            assert verify_coloring(g, p.witness, 3) is None


def test_certificate_round_trip_and_recheck():
    c = arrows(complete_graph(5), 3, 2)
    data = json.loads(c.dumps())
    assert set(data) >= {"host", "k", "r", "verdict", "witness", "stats"}
    back = ArrowCertificate.from_json(data)
    assert back.recheck()
    bad = dict(data, witness=[1] * 10)
    assert not ArrowCertificate.from_json(bad).recheck()
    assert ArrowCertificate.from_json(json.loads(arrows(complete_graph(6), 3, 2).dumps())).recheck()


@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_graphs(), st.sampled_from([(3, 2), (3, 3), (4, 2)]))
def test_search_agrees_with_enumeration(g, kr):
    k, r = kr
    if r**g.edge_count() > 3**10:
        r = 2
    cert = arrows(g, k, r)
    truth = enumeration_oracle(g, k, r)
    assert (cert.verdict is Outcome.ARROWS) == truth
    assert brute_force_arrows(g, k, r)[0] == truth
    if cert.witness is not None:
        assert verify_coloring(g, cert.witness, k) is None


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=6, max_edges=10), st.permutations([1, 2, 3]))
def test_colour_permutation_keeps_witness_proper(g, perm):
    cert = arrows(g, 3, 3)
    if cert.witness is not None:
        relabelled = cert.witness.relabel({i + 1: perm[i] for i in range(3)})
        assert verify_coloring(g, relabelled, 3) is None


def test_monotone_under_adding_edges():
    g = complete_graph(6)
    assert arrows(g, 3, 2).verdict is Outcome.ARROWS
    bigger = Graph.from_edges(7, list(g.edges()) + [(5, 6), (0, 6)])
    assert arrows(bigger, 3, 2).verdict is Outcome.ARROWS
