import math
import statistics
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sparsetw.constructions import random_trim_supergraph, subdivide
from sparsetw.dedensify import (BudgetExhausted, Refusal, TrimSupergraph, assemble_sparse_witness,
                                balanced_partitions, biclique_model, clique_to_biclique_split,
                                count_balanced_partitions, dedensify_balanced, legal_extra_pairs, sub_trim,
                                validate_trim)
from sparsetw.graph import Graph, GraphError, complete_bipartite, complete_graph, induced_subgraph, is_two_connected
from sparsetw.minors import validate_model
from sparsetw.width import tw_lower_bound_from_witness
from oracles import brute_dedensify, set_partitions_balanced


def _with_extra(t, pair):
    host = Graph(t.host.n, list(t.host.edges) + [pair])
    return TrimSupergraph(host, t.skeleton, t.branch, t.paths, t.sides)


def test_validate_trim_examples():
    t = random_trim_supergraph("biclique", 2, 3, 0, seed=0)
    assert validate_trim(t) is None
    p = t.paths[(0, 2)]
    assert "chord" in validate_trim(_with_extra(t, (min(p[0], p[2]), max(p[0], p[2]))))
    q = t.paths[(0, 3)]
    inner = q[1:-1]
    assert len(inner) >= 2
    # consecutive subdivision vertices are already adjacent; a chord skipping one is rejected
    longer = random_trim_supergraph("biclique", 2, 4, 0, seed=1)
    r = longer.paths[(0, 2)]
    assert "chord" in validate_trim(_with_extra(longer, tuple(sorted((r[1], r[3])))))
    b0, b1 = t.branch[0], t.branch[1]
    assert "two branch vertices" in validate_trim(_with_extra(t, (min(b0, b1), max(b0, b1))))


def test_legal_pairs_respect_taxonomy():
    t = random_trim_supergraph("clique", 4, 3, 0, seed=2)
    own = t.owners()
    for u, v in legal_extra_pairs(t):
        assert not (len(own[u]) == 1 and len(own[v]) == 1)
        assert validate_trim(_with_extra(t, (u, v))) is None


def test_json_round_trip():
    t = random_trim_supergraph("biclique", 3, 3, 4, seed=3)
    back = TrimSupergraph.from_json(t.host, t.to_json())
    assert back.branch == t.branch and back.paths == t.paths and back.sides == t.sides


def test_split_examples():
    host, spec = subdivide(complete_graph(6), 3)
    t = TrimSupergraph(host, complete_graph(6), spec.branch, spec.paths)
    split = clique_to_biclique_split(t, seed=0)
    assert validate_trim(split.trim) is None
    # equal lengths: s^2 of the C(2s,2) paths survive
    assert split.retained == 6 + 9 * 2
    assert 2 * split.retained >= t.n
    host, spec = subdivide(complete_graph(4), 1)
    t1 = TrimSupergraph(host, complete_graph(4), spec.branch, spec.paths)
    assert clique_to_biclique_split(t1).retained == t1.n


@pytest.mark.parametrize("seed", range(5))
def test_split_exhaustive_small(seed):
    t = random_trim_supergraph("clique", 4, 2, 2, seed=seed)
    split = clique_to_biclique_split(t, exhaustive=True)
    best = 0
    for a in [(0, 1), (0, 2), (0, 3)]:
        b = tuple(v for v in range(4) if v not in a)
        kept = 4 + sum(len(t.paths[(min(x, y), max(x, y))]) - 2 for x in a for y in b)
        best = max(best, kept)
    assert split.retained == best


def test_split_rejects_odd():
    with pytest.raises(GraphError):
        clique_to_biclique_split(random_trim_supergraph("clique", 5, 2, 0, seed=0))


def test_balanced_partitions_enumeration():
    for s, h in [(4, 2), (4, 4), (6, 2), (6, 3), (8, 4)]:
        ours = [sorted(map(sorted, p)) for p in balanced_partitions(range(s), h)]
        assert len(ours) == count_balanced_partitions(s, h)
        assert sorted(ours) == sorted(sorted(p) for p in set_partitions_balanced(range(s), h))


def test_dedensify_trivial_cases():
    t = random_trim_supergraph("biclique", 4, 3, 0, seed=1)
    d = dedensify_balanced(t, 2)
    assert d.extras == 0
    t = random_trim_supergraph("biclique", 4, 3, 12, seed=1)
    d = dedensify_balanced(t, 4)
    # cells with two branch vertices can carry no extra edge
    assert d.extras == 0
    with pytest.raises(GraphError):
        dedensify_balanced(t, 3)


@pytest.mark.parametrize("seed", range(20))
def test_cells_with_two_branch_vertices_have_no_extras(seed):
    from sparsetw.dedensify import _CellTable, random_balanced_partition
    import random

    t = random_trim_supergraph("biclique", 4, 3, 10, seed=seed)
    extras, verts = _CellTable(t).score(*(random_balanced_partition(s, 4, random.Random(seed)) for s in t.sides))
    assert all(x == 0 for row in extras for x in row)


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("h", [2, 4])
def test_dedensify_matches_brute_force(seed, h):
    t = random_trim_supergraph("biclique", 4, 3, 6, seed=seed)
    d = dedensify_balanced(t, h)
    assert validate_trim(d.trim) is None
    assert d.extras * h * t.n <= len(t.extra_edges()) * d.vertices
    assert (d.extras, d.vertices) == brute_dedensify(t, h)
    assert d.trim.ell >= t.ell


@pytest.mark.parametrize("seed", range(5))
def test_cells_partition_the_subdivision(seed):
    from sparsetw.dedensify import _CellTable

    t = random_trim_supergraph("biclique", 4, 3, 8, seed=seed)
    pa = next(balanced_partitions(t.sides[0], 2))
    pb = next(balanced_partitions(t.sides[1], 2))
    cells = [sub_trim(t, list(a) + list(b), (a, b)) for a in pa for b in pb]
    assert sum(c.n for c in cells) >= t.n
    extra_sets = [{tuple(sorted((c.origin_of(u), c.origin_of(v)))) for u, v in c.extra_edges()} for c in cells]
    for i in range(len(extra_sets)):
        for j in range(i + 1, len(extra_sets)):
            assert not extra_sets[i] & extra_sets[j]
    extras, _ = _CellTable(t).score(pa, pb)
    assert sorted(x for row in extras for x in row) == sorted(len(s) for s in extra_sets)


@pytest.mark.parametrize("seed", range(5))
def test_sampled_mean_below_m_over_h(seed):
    t = random_trim_supergraph("biclique", 6, 3, 20, seed=seed)
    h = 3
    d = dedensify_balanced(t, h, mode="sampled", seed=seed, draws=300)
    m = len(t.extra_edges())
    mean = statistics.mean(d.sums)
    se = statistics.stdev(d.sums) / math.sqrt(len(d.sums))
    assert mean <= m / h + 3 * se


def test_exhaustive_budget():
    t = random_trim_supergraph("biclique", 8, 3, 5, seed=0)
    with pytest.raises(BudgetExhausted):
        dedensify_balanced(t, 2, budget=10)


def test_assembly_plain_k8():
    t = random_trim_supergraph("clique", 8, 3, 0, seed=0)
    a = assemble_sparse_witness(t, 2, 1)
    assert a.ok
    g, _ = induced_subgraph(t.host, a.vertices)
    assert is_two_connected(g)
    assert g.m <= Fraction(3, 2) * g.n
    assert tw_lower_bound_from_witness(g, a.model) >= 2


def test_assembly_refuses_short_paths():
    t = random_trim_supergraph("clique", 8, 2, 0, seed=0, mode="exact")
    with pytest.raises(Refusal) as exc:
        assemble_sparse_witness(t, 2, Fraction(1, 2))
    assert exc.value.inequality == "ell >= ceil(2/eps)+1"
    assert "5" in exc.value.detail


def test_assembly_refuses_large_w():
    t = random_trim_supergraph("clique", 8, 3, 0, seed=0)
    with pytest.raises(Refusal) as exc:
        assemble_sparse_witness(t, 5, 1)
    assert exc.value.inequality == "s >= h*w"


@pytest.mark.parametrize("seed", range(6))
def test_assembly_with_planted_extras(seed):
    t = random_trim_supergraph("clique", 16, 5, 0, seed=seed)
    n = t.n
    t = random_trim_supergraph("clique", 16, 5, n // 4, seed=seed)
    eps = Fraction(1, 2)
    a = assemble_sparse_witness(t, 1, eps, seed=seed)
    assert a.ok
    g, _ = induced_subgraph(t.host, a.vertices)
    extras = len(a.trim.extra_edges())
    assert extras <= eps / 2 * g.n
    assert g.m <= (1 + eps) * g.n
    base = max(1, math.ceil(4 * Fraction(len(t.extra_edges()), t.n) / eps))
    assert a.h == min(x for x in range(base, 9) if 8 % x == 0)
    assert validate_model(g, a.model) is None


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(3, 5), st.integers(0, 10), st.integers(0, 10 ** 6))
def test_every_output_is_trim(s, ell, extras, seed):
    try:
        t = random_trim_supergraph("clique", 2 * s, ell, extras, seed)
    except GraphError:
        return
    split = clique_to_biclique_split(t, seed=seed)
    assert validate_trim(split.trim) is None
    for h in [x for x in range(1, s + 1) if s % x == 0]:
        d = dedensify_balanced(split.trim, h)
        assert validate_trim(d.trim) is None
