import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from sparsetw.constructions import grid, inflate, random_graph, random_trim_supergraph, subdivide, wall
from sparsetw.dedensify import TrimSupergraph
from sparsetw.graph import Graph, GraphError, complete_bipartite, complete_graph, cycle_graph, disjoint_union, path_graph
from sparsetw.minors import (ABSENT, EXHAUSTED, FOUND, InducedMinorModel, SubdivisionWitness, branch_set_shape,
                             check_clique_subdivision, compose_models, find_clique_minor, find_clique_subdivision,
                             find_induced_minor, green_clique_ramsey, identity_model, refine_to_minimal, validate_model)
from sparsetw.walls import planted_wall_host
from oracles import brute_minor, brute_treewidth


def test_validate_model_examples():
    g = grid(3)
    assert validate_model(g, identity_model(g)) is None
    m = InducedMinorModel.of(complete_graph(2), [[0, 2], [4]])
    assert validate_model(g, m) == "branch set 0 is not connected"
    m = InducedMinorModel.of(Graph(2), [[0], [1]])
    assert "no edge" in validate_model(g, m)
    assert validate_model(g, m, induced=False) is None
    m = InducedMinorModel.of(complete_graph(2), [[0, 1], [1]])
    assert "overlaps" in validate_model(g, m)


def test_model_json_round_trip():
    m = InducedMinorModel.of(complete_graph(2), [[0, 1], [2]], induced=False)
    assert InducedMinorModel.from_json(m.to_json()) == m


def test_refine_examples():
    g = grid(3)
    assert refine_to_minimal(g, identity_model(g)) == identity_model(g)
    m = InducedMinorModel.of(complete_graph(2), [[0, 1], [2, 3]])
    r = refine_to_minimal(path_graph(4), m)
    assert r.branch_sets == (frozenset({1}), frozenset({2}))
    with pytest.raises(GraphError):
        refine_to_minimal(path_graph(4), InducedMinorModel.of(complete_graph(2), [[0], [3]]))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([complete_graph(3), cycle_graph(4), grid(2), path_graph(3), complete_bipartite(2, 3)]),
       st.integers(1, 4), st.integers(0, 10 ** 6))
def test_refine_keeps_validity_and_never_grows(pat, blob, seed):
    host, blobs = inflate(pat, blob, seed)
    m = InducedMinorModel.of(pat, blobs)
    r = refine_to_minimal(host, m)
    assert validate_model(host, r) is None
    assert all(a <= b for a, b in zip(r.branch_sets, m.branch_sets))
    # no single deletion survives
    for i, s in enumerate(r.branch_sets):
        for v in s:
            if len(s) == 1:
                continue
            sets = list(r.branch_sets)
            sets[i] = s - {v}
            assert validate_model(host, InducedMinorModel(pat, tuple(sets))) is not None


@pytest.mark.parametrize("seed", range(8))
def test_minimal_models_of_subdivided_walls_are_paths_tripods_or_lines(seed):
    host, model = planted_wall_host(6, seed, ell=2)
    r = refine_to_minimal(host, model)
    shapes = [branch_set_shape(host, s) for s in r.branch_sets]
    assert None not in shapes
    assert set(shapes) <= {"path", "tripod", "line-of-tripod"}


def test_find_induced_minor_examples():
    g = complete_bipartite(2, 3)
    res = find_induced_minor(g, g)
    assert res.found and res.witness == identity_model(g)
    assert find_induced_minor(complete_graph(4), cycle_graph(4)).status == ABSENT
    host, _ = inflate(grid(2), 3, seed=11)
    res = find_induced_minor(host, grid(2))
    assert res.found and validate_model(host, res.witness) is None


def test_three_valued_results():
    host = random_graph(16, 0.3, 5)
    assert find_induced_minor(host, complete_graph(5), budget=10).status == EXHAUSTED
    assert find_induced_minor(random_graph(20, 0.2, 1), complete_graph(3)).status == EXHAUSTED
    assert find_induced_minor(path_graph(5), complete_graph(3)).status == ABSENT


def test_search_is_deterministic():
    host = random_graph(12, 0.4, 9)
    a = find_induced_minor(host, cycle_graph(4))
    b = find_induced_minor(host, cycle_graph(4))
    assert a == b


def _lex_least(host, pattern, order):
    """Least label vector (deleted = q) over every valid model, by full enumeration."""
    q = pattern.n
    from itertools import product

    best = None
    for labels in product(range(q + 1), repeat=host.n):
        sets = [[order[t] for t in range(host.n) if labels[t] == i] for i in range(q)]
        if any(not s for s in sets):
            continue
        if validate_model(host, InducedMinorModel.of(pattern, sets)) is None:
            best = labels
            break
    return best


@pytest.mark.parametrize("seed", range(6))
def test_witness_is_lexicographically_least(seed):
    from sparsetw.minors import search_order

    host = random_graph(7, 0.45, seed)
    pat = path_graph(3)
    res = find_induced_minor(host, pat)
    order = search_order(host)
    least = _lex_least(host, pat, order)
    if least is None:
        assert res.status == ABSENT
        return
    got = tuple(next((i for i, s in enumerate(res.witness.branch_sets) if v in s), pat.n) for v in order)
    assert got == least


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 8), st.floats(0.2, 0.8), st.integers(0, 10 ** 6),
       st.sampled_from([path_graph(3), complete_graph(3), cycle_graph(4), Graph(3), Graph(4, [(0, 1), (2, 3)]),
                        complete_bipartite(1, 3), Graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)])]),
       st.booleans())
def test_find_matches_brute_force(n, p, seed, pat, induced):
    host = random_graph(n, p, seed)
    res = find_induced_minor(host, pat, induced=induced)
    ref = brute_minor(host, pat, induced=induced)
    assert res.found == (ref is not None)
    if res.found:
        assert validate_model(host, res.witness, induced=induced) is None


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_composition_is_transitive(seed):
    rng = random.Random(seed)
    a = rng.choice([path_graph(3), complete_graph(3), cycle_graph(4)])
    b, blobs_ab = inflate(a, 2, seed=rng.randrange(10 ** 6))
    c, blobs_bc = inflate(b, 2, seed=rng.randrange(10 ** 6))
    ab = InducedMinorModel.of(a, blobs_ab)
    bc = InducedMinorModel.of(b, blobs_bc)
    assert validate_model(c, compose_models(ab, bc)) is None


def test_clique_minor_plain_mode():
    res = find_clique_minor(grid(3), 4)
    assert res.found and validate_model(grid(3), res.witness, induced=False) is None
    assert find_clique_minor(cycle_graph(6), 4).status == ABSENT


def test_clique_subdivision_examples():
    res = find_clique_subdivision(complete_graph(5), 4)
    assert res.found and all(len(p) == 2 for p in res.witness.paths.values())
    # a cycle is itself a subdivided triangle
    assert find_clique_subdivision(cycle_graph(6), 3).found
    assert find_clique_subdivision(cycle_graph(6), 4).status == ABSENT


def test_planted_k4_subdivision_recovered_minimally():
    sub, spec = subdivide(complete_graph(4), 2)
    rng = random.Random(0)
    noise = Graph(4, [(0, 1), (1, 2)])
    g = disjoint_union(sub, noise)
    g = Graph(g.n, list(g.edges) + [(spec.subdivision_vertices()[0], sub.n)])
    res = find_clique_subdivision(g, 4)
    assert res.found
    assert check_clique_subdivision(g, res.witness) is None
    assert len(res.witness.vertex_set()) == sub.n


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 9), st.floats(0.2, 0.7), st.integers(0, 10 ** 6))
def test_clique_subdivision_against_structure(n, p, seed):
    g = random_graph(n, p, seed)
    k3 = find_clique_subdivision(g, 3)
    assert k3.found == (not nx.is_forest(nx.Graph(list(g.edges)))) if g.m else not k3.found
    # K_4 is subcubic, so a K_4 subdivision exists iff treewidth is at least 3
    k4 = find_clique_subdivision(g, 4)
    assert k4.found == (brute_treewidth(g) >= 3)
    for r in (k3, k4):
        if r.found:
            assert check_clique_subdivision(g, r.witness) is None


def test_subdivision_witness_checker():
    w = SubdivisionWitness((0, 1, 2), {(0, 1): (0, 1), (0, 2): (0, 2), (1, 2): (1, 2)})
    assert check_clique_subdivision(complete_graph(3), w) is None
    assert check_clique_subdivision(path_graph(3), w) is not None
    assert SubdivisionWitness.from_json(w.to_json()) == w


def _trim_with_lengths(lengths):
    from sparsetw.constructions import subdivide as sd

    t = max(max(e) for e in lengths) + 1
    host, spec = sd(complete_graph(t), lengths)
    return TrimSupergraph(host, complete_graph(t), spec.branch, spec.paths)


def test_green_clique_examples():
    k5 = complete_graph(5)
    t = _trim_with_lengths({e: 4 for e in k5.edges})
    assert green_clique_ramsey(t, 3, 3) == [0, 1, 2]
    t = _trim_with_lengths({e: 1 for e in k5.edges})
    assert green_clique_ramsey(t, 1, 2) is None
    b = random_trim_supergraph("biclique", 2, 2, 0, seed=0)
    with pytest.raises(GraphError):
        green_clique_ramsey(b, 1, 2)


@pytest.mark.parametrize("seed", range(15))
def test_green_clique_matches_triples(seed):
    rng = random.Random(seed)
    k6 = complete_graph(6)
    lengths = {e: rng.randint(1, 4) for e in k6.edges}
    t = _trim_with_lengths(lengths)
    ell = 2
    got = green_clique_ramsey(t, ell, 3)
    triples = [c for c in combinations(range(6), 3)
               if all(lengths[(min(a, b), max(a, b))] > ell for a, b in combinations(c, 2))]
    if not triples:
        assert got is None
    else:
        assert got == sorted(t.branch[v] for v in triples[0])
