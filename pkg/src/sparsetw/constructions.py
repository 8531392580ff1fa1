"""Generators for grids, walls, subdivisions, quasi-subdivisions and trim supergraphs.

All random generators take an explicit seed and are reproducible.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .graph import Edge, Graph, GraphError, complete_bipartite, complete_graph

Lengths = Union[int, Mapping[Edge, int]]


def grid(k: int) -> Graph:
    """k x k grid; vertex ids row-major, labels are 1-based (i, j) points."""
    if k < 1:
        raise GraphError("grid needs k >= 1")
    labels = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1)]
    idx = {lab: t for t, lab in enumerate(labels)}
    edges = []
    for (i, j), t in idx.items():
        if i < k:
            edges.append((t, idx[(i + 1, j)]))
        if j < k:
            edges.append((t, idx[(i, j + 1)]))
    return Graph(k * k, edges, labels)


def wall(k: int) -> Graph:
    """k x k wall as a subgraph of the 2k x k grid.

    Labels are (column, row) with column in 1..2k and row in 1..k. The
    vertical edge (c, r)-(c, r+1) is kept iff c and r have the same parity;
    the two resulting degree-1 vertices are then deleted.
    """
    if k < 2:
        raise GraphError("wall needs k >= 2")
    pts = [(c, r) for r in range(1, k + 1) for c in range(1, 2 * k + 1)]
    nb: Dict[Tuple[int, int], set] = {p: set() for p in pts}
    for c, r in pts:
        if c < 2 * k:
            nb[(c, r)].add((c + 1, r))
            nb[(c + 1, r)].add((c, r))
        if r < k and (c - r) % 2 == 0:
            nb[(c, r)].add((c, r + 1))
            nb[(c, r + 1)].add((c, r))
    leaves = [p for p in pts if len(nb[p]) == 1]
    if len(leaves) != 2:
        raise AssertionError("wall construction should create exactly two leaves")
    keep = [p for p in pts if p not in leaves]
    idx = {p: t for t, p in enumerate(keep)}
    edges = {(min(idx[p], idx[q]), max(idx[p], idx[q])) for p in keep for q in nb[p] if q in idx}
    return Graph(len(keep), edges, keep)


@dataclass(frozen=True)
class SubdivisionSpec:
    """Provenance of a subdivision: skeleton, branch ids and direct paths.

    ``paths[(a, b)]`` (a < b, skeleton ids) lists host vertices from
    ``branch[a]`` to ``branch[b]`` inclusive.
    """

    skeleton: Graph
    branch: Tuple[int, ...]
    paths: Dict[Edge, Tuple[int, ...]]

    @property
    def lengths(self) -> Dict[Edge, int]:
        return {e: len(p) - 1 for e, p in self.paths.items()}

    def subdivision_vertices(self) -> List[int]:
        return sorted(v for p in self.paths.values() for v in p[1:-1])

    def check(self, host: Graph) -> None:
        """Raise AssertionError unless this subdivision is exactly ``host``."""
        assert len(self.branch) == self.skeleton.n
        assert set(self.paths) == set(self.skeleton.edges)
        expected = set()
        seen = list(self.branch)
        for (a, b), p in self.paths.items():
            assert p[0] == self.branch[a] and p[-1] == self.branch[b]
            seen.extend(p[1:-1])
            for u, v in zip(p, p[1:]):
                expected.add((min(u, v), max(u, v)))
        assert len(seen) == len(set(seen)) == host.n
        assert expected == set(host.edges)


def _edge_lengths(h: Graph, lengths: Lengths, mode: str, rng: random.Random, spread: int) -> Dict[Edge, int]:
    out = {}
    for e in h.sorted_edges():
        base = lengths if isinstance(lengths, int) else lengths[e]
        if base < 1:
            raise GraphError("path lengths must be at least 1")
        if mode == "exact":
            out[e] = base
        elif mode == "at-least":
            out[e] = base + rng.randint(0, spread)
        else:
            raise GraphError(f"unknown subdivision mode {mode!r}")
    return out


def subdivide(h: Graph, lengths: Lengths = 1, mode: str = "exact", seed: int = 0,
              spread: int = 2) -> Tuple[Graph, SubdivisionSpec]:
    """Replace each edge of ``h`` by a path.

    In ``at-least`` mode each edge gets ``ell + U{0..spread}`` edges drawn
    from ``random.Random(seed)``. Branch vertices keep ids 0..|V(h)|-1.
    """
    rng = random.Random(seed)
    lens = _edge_lengths(h, lengths, mode, rng, spread)
    nxt = h.n
    edges = []
    paths = {}
    for (a, b) in h.sorted_edges():
        inner = list(range(nxt, nxt + lens[(a, b)] - 1))
        nxt += len(inner)
        p = (a, *inner, b)
        paths[(a, b)] = p
        edges.extend(zip(p, p[1:]))
    g = Graph(nxt, edges)
    return g, SubdivisionSpec(h, tuple(range(h.n)), paths)


@dataclass(frozen=True)
class QuasiSubdivision:
    """Quasi-subdivision of a subcubic pattern inside a host graph.

    ``anchors[p]`` is the single host vertex of pattern vertex p, or the
    three corners of the triangle replacing it. ``ports[(p, q)]`` is the
    vertex of p's anchor where the path towards q starts, and
    ``paths[(p, q)]`` (p < q) lists the path's interior host vertices in
    order from p's side to q's side.
    """

    pattern: Graph
    anchors: Tuple[Tuple[int, ...], ...]
    ports: Dict[Tuple[int, int], int]
    paths: Dict[Edge, Tuple[int, ...]]
    wall_index: Optional[int] = None

    def vertex_set(self) -> List[int]:
        out = [v for a in self.anchors for v in a]
        out.extend(v for p in self.paths.values() for v in p)
        return sorted(out)

    def triangles(self) -> List[int]:
        return [p for p, a in enumerate(self.anchors) if len(a) == 3]

    def roles(self) -> Dict[int, str]:
        out = {}
        for a in self.anchors:
            for v in a:
                out[v] = "triangle" if len(a) == 3 else "branch"
        for p in self.paths.values():
            for v in p:
                out[v] = "path"
        return out

    def full_path(self, p: int, q: int) -> List[int]:
        """Host path from p's port to q's port inclusive."""
        e = (min(p, q), max(p, q))
        inner = list(self.paths[e])
        if p > q:
            inner.reverse()
        return [self.ports[(p, q)], *inner, self.ports[(q, p)]]

    def expected_edges(self) -> set:
        out = set()
        for a in self.anchors:
            if len(a) == 3:
                x, y, z = a
                out |= {(min(x, y), max(x, y)), (min(x, z), max(x, z)), (min(y, z), max(y, z))}
        for p, q in self.paths:
            fp = self.full_path(p, q)
            out |= {(min(u, v), max(u, v)) for u, v in zip(fp, fp[1:])}
        return out


def check_quasi_subdivision(host: Graph, qs: QuasiSubdivision) -> Optional[str]:
    """None if ``host[qs.vertex_set()]`` is exactly the described quasi-subdivision.

    Otherwise a message naming the first violation.
    """
    pat = qs.pattern
    if pat.max_degree() > 3:
        return "pattern is not subcubic"
    if len(qs.anchors) != pat.n:
        return "one anchor per pattern vertex required"
    verts = [v for a in qs.anchors for v in a] + [v for p in qs.paths.values() for v in p]
    if len(verts) != len(set(verts)):
        return "witness vertices are not disjoint"
    if any(not 0 <= v < host.n for v in verts):
        return "witness vertex out of range"
    if set(qs.paths) != set(pat.edges):
        return "paths must be given for exactly the pattern edges"
    for p, a in enumerate(qs.anchors):
        if len(a) not in (1, 3):
            return f"anchor of {p} must have 1 or 3 vertices"
        if len(a) == 3 and pat.degree(p) != 3:
            return f"triangle at pattern vertex {p} of degree {pat.degree(p)}"
        ports = [qs.ports.get((p, q)) for q in sorted(pat.neighbors(p))]
        if any(x not in a for x in ports):
            return f"port of {p} outside its anchor"
        if len(a) == 3 and len(set(ports)) != 3:
            return f"triangle at {p} must use one corner per incident edge"
    vs = set(verts)
    induced = {(u, v) for (u, v) in host.edges if u in vs and v in vs}
    expected = qs.expected_edges()
    if induced != expected:
        missing = sorted(expected - induced)
        extra = sorted(induced - expected)
        if missing:
            return f"expected edge {missing[0]} missing from host"
        return f"host has unexpected edge {extra[0]} among witness vertices"
    return None


def quasi_subdivide(h: Graph, triangle_set=(), lengths: Lengths = 1, seed: int = 0,
                    mode: str = "exact", spread: int = 2) -> Tuple[Graph, QuasiSubdivision]:
    """Subdivide ``h`` and replace the selected degree-3 vertices by triangles.

    A replaced vertex v with path-neighbors x, y, z becomes the triangle
    v_x v_y v_z with v_x adjacent to x, etc. Created corners are never
    replaced again.
    """
    if h.max_degree() > 3:
        raise GraphError("quasi-subdivisions need a subcubic pattern")
    tri = set(triangle_set)
    for v in tri:
        if h.degree(v) != 3:
            raise GraphError(f"vertex {v} has degree {h.degree(v)}, not 3")
    rng = random.Random(seed)
    lens = _edge_lengths(h, lengths, mode, rng, spread)
    nxt = 0
    anchors = []
    for v in range(h.n):
        size = 3 if v in tri else 1
        anchors.append(tuple(range(nxt, nxt + size)))
        nxt += size
    ports = {}
    for v in range(h.n):
        for t, w in enumerate(sorted(h.neighbors(v))):
            ports[(v, w)] = anchors[v][t if v in tri else 0]
    paths = {}
    for e in h.sorted_edges():
        k = lens[e] - 1
        paths[e] = tuple(range(nxt, nxt + k))
        nxt += k
    qs = QuasiSubdivision(h, tuple(anchors), ports, paths)
    g = Graph(nxt, qs.expected_edges())
    return g, qs


def wall_quasi_subdivision(k: int, triangle_fraction: float = 0.0, ell: int = 1, seed: int = 0,
                           mode: str = "at-least", spread: int = 2) -> Tuple[Graph, QuasiSubdivision]:
    """Planted quasi-subdivision of W_k with a random share of triangles."""
    w = wall(k)
    rng = random.Random(seed)
    deg3 = [v for v in w.vertices() if w.degree(v) == 3]
    tri = sorted(v for v in deg3 if rng.random() < triangle_fraction)
    g, qs = quasi_subdivide(w, tri, ell, seed=rng.randrange(1 << 30), mode=mode, spread=spread)
    return g, QuasiSubdivision(w, qs.anchors, qs.ports, qs.paths, wall_index=k)


def random_trim_supergraph(kind: str, s: int, ell: int, extra_count: int, seed: int,
                           mode: str = "at-least", spread: int = 2):
    """Subdivision of K_s (``kind='clique'``) or K_{s,s} (``'biclique'``) plus extra edges.

    Extra edges are sampled uniformly without replacement among pairs that
    keep every direct path induced and never join two branch vertices.
    Raises GraphError when fewer legal pairs exist than requested.
    """
    from .dedensify import TrimSupergraph, legal_extra_pairs

    if kind == "clique":
        skel = complete_graph(s)
        sides = None
    elif kind == "biclique":
        skel = complete_bipartite(s, s)
        sides = (tuple(range(s)), tuple(range(s, 2 * s)))
    else:
        raise GraphError(f"unknown skeleton kind {kind!r}")
    rng = random.Random(seed)
    base, spec = subdivide(skel, ell, mode=mode, seed=rng.randrange(1 << 30), spread=spread)
    plain = TrimSupergraph(base, skel, spec.branch, spec.paths, sides)
    legal = legal_extra_pairs(plain)
    if extra_count > len(legal):
        raise GraphError(f"only {len(legal)} legal extra edges, {extra_count} requested")
    extra = rng.sample(legal, extra_count)
    host = Graph(base.n, list(base.edges) + extra)
    return TrimSupergraph(host, skel, spec.branch, spec.paths, sides)


def inflate(h: Graph, blob_size: int = 3, seed: int = 0) -> Tuple[Graph, List[List[int]]]:
    """Replace each vertex of ``h`` by a random connected blob.

    Each pattern edge becomes one edge between random blob members, so the
    blobs form an induced minor model of ``h``. Returns the host and the
    blobs (branch sets) indexed by pattern vertex.
    """
    rng = random.Random(seed)
    blobs = []
    edges = []
    nxt = 0
    for _ in range(h.n):
        size = rng.randint(1, blob_size)
        members = list(range(nxt, nxt + size))
        nxt += size
        for t in range(1, size):
            edges.append((members[rng.randrange(t)], members[t]))
        blobs.append(members)
    for a, b in h.sorted_edges():
        edges.append((rng.choice(blobs[a]), rng.choice(blobs[b])))
    return Graph(nxt, edges), blobs


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])
