from fractions import Fraction
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from sparsetw.constructions import (check_quasi_subdivision, grid, inflate, quasi_subdivide, random_trim_supergraph,
                                    subdivide, wall, wall_quasi_subdivision)
from sparsetw.dedensify import validate_trim
from sparsetw.graph import GraphError, complete_bipartite, complete_graph, line_graph
from oracles import tikz_wall, to_nx

DATA = Path(__file__).parent / "data"


def test_grid_examples():
    assert grid(1).n == 1 and grid(1).m == 0
    assert nx.is_isomorphic(to_nx(grid(2)), nx.cycle_graph(4))
    g = grid(5)
    assert (g.n, g.m) == (25, 40)
    for k in range(1, 8):
        assert grid(k).m == 2 * k * (k - 1)
        assert nx.is_isomorphic(to_nx(grid(k)), nx.grid_2d_graph(k, k))
    with pytest.raises(GraphError):
        grid(0)


def _labelled_edges(g):
    lab = g.labels
    return {frozenset((lab[u], lab[v])) for u, v in g.edges}


def test_wall_matches_golden_drawing():
    golden = set()
    for line in (DATA / "wall5_golden.txt").read_text().splitlines():
        if line.startswith("#"):
            continue
        a, b, c, d = map(int, line.split())
        golden.add(frozenset(((a, b), (c, d))))
    w = wall(5)
    assert w.n == 48
    assert _labelled_edges(w) == golden
    assert {frozenset(e) for e in tikz_wall(5).edges} == golden


@pytest.mark.parametrize("k", range(2, 9))
def test_wall_counts_and_drawing(k):
    w = wall(k)
    assert w.n == 2 * k * k - 2
    assert w.max_degree() == (3 if k >= 3 else 2)
    assert _labelled_edges(w) == {frozenset(e) for e in tikz_wall(k).edges}


def test_small_walls():
    assert nx.is_isomorphic(to_nx(wall(2)), nx.cycle_graph(6))
    assert wall(3).n == 16
    with pytest.raises(GraphError):
        wall(1)


def test_subdivide_examples():
    g, spec = subdivide(complete_graph(3), 1)
    assert g == complete_graph(3)
    g, spec = subdivide(complete_graph(4), 2)
    assert g.n == 10
    spec.check(g)
    g, spec = subdivide(complete_bipartite(2, 2), 3)
    assert g.n == 12
    with pytest.raises(GraphError):
        subdivide(complete_graph(3), 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 3), st.integers(0, 10 ** 6))
def test_subdivision_properties(s, ell, spread, seed):
    g, spec = subdivide(complete_graph(s), ell, mode="at-least", seed=seed, spread=spread)
    spec.check(g)
    assert all(ell <= L <= ell + spread for L in spec.lengths.values())
    # branch vertices are independent once every edge is subdivided
    assert not any(g.has_edge(a, b) for a in spec.branch for b in spec.branch if a < b)
    assert g.m * (ell - 1) <= g.n * ell
    again, _ = subdivide(complete_graph(s), ell, mode="at-least", seed=seed, spread=spread)
    assert again == g


def test_quasi_subdivide_examples():
    star = complete_bipartite(1, 3)
    g, qs = quasi_subdivide(star, [0], 1)
    # triangle plus one pendant per corner
    assert (g.n, g.m) == (6, 6)
    assert sorted(g.degree(v) for v in g.vertices()) == [1, 1, 1, 3, 3, 3]
    assert check_quasi_subdivision(g, qs) is None
    g2, qs2 = quasi_subdivide(wall(3), [], 2)
    g3, _ = subdivide(wall(3), 2)
    assert nx.is_isomorphic(to_nx(g2), to_nx(g3))
    with pytest.raises(GraphError):
        quasi_subdivide(star, [1], 1)


def test_line_graph_of_subdivided_wall_is_full_quasi_subdivision():
    w = wall(3)
    sub, _ = subdivide(w, 2)
    lg, _ = line_graph(sub)
    deg3 = [v for v in w.vertices() if w.degree(v) == 3]
    # each wall vertex becomes a clique on its half-edges: a triangle at degree 3, an edge at degree 2
    # the second vertex of such an edge goes on one incident path
    lengths = {e: 1 for e in w.edges}
    for v in w.vertices():
        if w.degree(v) == 2:
            lengths[min((min(v, u), max(v, u)) for u in w.neighbors(v))] += 1
    q, qs = quasi_subdivide(w, deg3, lengths)
    assert check_quasi_subdivision(q, qs) is None
    assert nx.is_isomorphic(to_nx(lg), to_nx(q))


def test_quasi_subdivision_checker_catches_chords():
    g, qs = wall_quasi_subdivision(4, 0.5, 3, seed=1)
    assert check_quasi_subdivision(g, qs) is None
    path = next(p for p in qs.paths.values() if len(p) >= 3)
    from sparsetw.graph import Graph

    bad = Graph(g.n, list(g.edges) + [(min(path[0], path[2]), max(path[0], path[2]))])
    assert "unexpected edge" in check_quasi_subdivision(bad, qs)


def test_random_trim_examples():
    t = random_trim_supergraph("clique", 4, 3, 0, seed=0)
    assert validate_trim(t) is None and t.extra_edges() == []
    t = random_trim_supergraph("biclique", 2, 3, 1, seed=5)
    assert validate_trim(t) is None
    (u, v), = t.extra_edges()
    own = t.owners()
    assert own[u] != own[v]
    with pytest.raises(GraphError):
        random_trim_supergraph("clique", 4, 2, 10 ** 4, seed=0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["clique", "biclique"]), st.integers(2, 5), st.integers(2, 5), st.integers(0, 8),
       st.integers(0, 10 ** 6))
def test_random_trim_is_trim(kind, s, ell, extras, seed):
    try:
        t = random_trim_supergraph(kind, s, ell, extras, seed)
    except GraphError:
        return
    assert validate_trim(t) is None
    assert len(t.extra_edges()) == extras
    assert t.ell >= ell


def test_inflate_is_a_model():
    from sparsetw.minors import InducedMinorModel, validate_model

    host, blobs = inflate(grid(2), 3, seed=4)
    assert validate_model(host, InducedMinorModel.of(grid(2), blobs)) is None


@pytest.mark.parametrize("ell", [3, 5])
@pytest.mark.parametrize("s", range(2, 7))
def test_subdivision_density_bound(s, ell):
    for seed in range(5):
        g, _ = subdivide(complete_graph(s), ell, mode="at-least", seed=seed)
        assert Fraction(g.m) <= (1 + Fraction(1, ell - 1)) * g.n
