from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folkman.graph import (
    Graph,
    GraphFormatError,
    complete_graph,
    cycle_graph,
    empty_graph,
    from_edgelist,
    from_graph6,
    graham_graph,
    iter_graph6_lines,
    read_graph,
    sample_gnp,
    to_edgelist,
    to_graph6,
)


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(0, max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


def naive_cliques(g, k):
    return [q for q in combinations(range(g.n), k) if all(g.adjacent(u, v) for u, v in combinations(q, 2))]


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def test_complete_graph_counts():
    assert complete_graph(0).n == 0 and complete_graph(0).edge_count() == 0
    assert complete_graph(3).edge_count() == 3
    assert complete_graph(6).edge_count() == 15


def test_degrees_and_counts():
    assert all(cycle_graph(5).degree(v) == 2 for v in range(5))
    assert graham_graph().edge_count() == 23


def test_has_clique_examples():
    assert complete_graph(5).has_clique(5)
    assert not cycle_graph(5).has_clique(3)
    g = graham_graph()
    assert not g.has_clique(6)
    assert g.has_clique(5)
    ok, w = g.has_clique(5, witness=True)
    assert ok and g.is_clique(w) and len(w) == 5


def test_enumerate_cliques_examples():
    assert len(complete_graph(5).enumerate_cliques(3)) == 10
    assert cycle_graph(5).enumerate_cliques(3) == []
    g = graham_graph()
    assert g.enumerate_cliques(3) == naive_cliques(g, 3)


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_clique_enumeration_matches_naive_oracle(g):
    for k in range(1, g.n + 1):
        cl = g.enumerate_cliques(k)
        assert cl == naive_cliques(g, k)
        assert (len(cl) > 0) == g.has_clique(k)
    if g.n:
        assert g.clique_number() == max(len(c) for c in nx.find_cliques(to_nx(g)))


def test_induced_subgraph_examples():
    assert complete_graph(6).induced_subgraph([1, 3, 5]) == complete_graph(3)
    p = cycle_graph(5).induced_subgraph([0, 1, 2])
    assert p.edge_count() == 2 and p.edges() == ((0, 1), (1, 2))
    g = graham_graph()
    assert g.induced_subgraph(range(8)) == g


def test_graph6_known_encodings():
    assert to_graph6(complete_graph(3)) == "Bw"
    assert to_graph6(empty_graph(1)) == "@"
    assert from_graph6("Bw") == complete_graph(3)
    assert from_graph6("@") == empty_graph(1)


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=70))
def test_graph6_matches_networkx(g):
    ours = to_graph6(g)
    theirs = nx.to_graph6_bytes(to_nx(g), header=False).decode().strip()
    assert ours == theirs
    assert from_graph6(ours) == g


def test_graph6_round_trip_on_seeded_samples():
    for s in range(100):
        g = sample_gnp(12, 0.4, s)
        assert from_graph6(to_graph6(g)) == g


def test_graph6_long_header():
    g = sample_gnp(70, 0.1, 3)
    text = to_graph6(g)
    assert text.startswith("~")
    assert from_graph6(text) == g


@pytest.mark.parametrize("bad", ["", "B", "Bww", "B\x10", "~??"])
def test_graph6_rejects_malformed(bad):
    with pytest.raises(GraphFormatError):
        from_graph6(bad)


def test_edgelist_round_trip_and_files(tmp_path):
    g = graham_graph()
    assert from_edgelist(to_edgelist(g)) == g
    p = tmp_path / "g.g6"
    p.write_text(g.to_graph6() + "\n")
    assert read_graph(p) == g
    q = tmp_path / "g.txt"
    q.write_text(to_edgelist(g))
    assert read_graph(q) == g
    assert list(iter_graph6_lines("Bw\n@\n\n")) == [complete_graph(3), empty_graph(1)]


def test_invalid_graphs_rejected():
    with pytest.raises((ValueError, GraphFormatError)):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises((ValueError, GraphFormatError)):
        Graph(2, (0b10, 0))


def test_sample_gnp_extremes_and_purity():
    assert sample_gnp(10, 0.0, 5) == empty_graph(10)
    assert sample_gnp(10, 1.0, 5) == complete_graph(10)
    assert sample_gnp(20, 0.3, 42) == sample_gnp(20, 0.3, 42)
    assert sample_gnp(20, 0.3, 42) != sample_gnp(20, 0.3, 43)


def test_sample_gnp_edge_count_statistics():
    counts = np.array([sample_gnp(50, 0.5, s).edge_count() for s in range(1000)])
    m = 50 * 49 // 2
    # the mean of 1000 Binomial(m, 1/2) draws has standard deviation sqrt(m/4/1000)
    assert abs(counts.mean() - m / 2) <= 3 * np.sqrt(m / 4 / 1000)


def test_complement_and_edits():
    g = cycle_graph(5)
    assert g.complement().edge_count() == 5
    assert complete_graph(8).remove_edges(cycle_graph(5).edges()).edge_count() == 23
    assert g.add_edges([(0, 2)]).edge_count() == 6
    assert g.is_subgraph_of(complete_graph(5))
