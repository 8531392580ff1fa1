"""Grid/wall induced-minor models, quasi-subdivision extraction and sparse thinning.

Wall coordinates are (column, row) with 1-based indices, as produced by
:func:`constructions.wall`; grid coordinates are (x, y).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .constructions import QuasiSubdivision, check_quasi_subdivision, grid, subdivide, wall
from .graph import Graph, GraphError, induced_subgraph, is_two_connected
from .minors import (
    InducedMinorModel,
    branch_set_shape,
    refine_to_minimal,
    validate_model,
)

Point = Tuple[int, int]


# -- Fig. 2 contraction patterns ------------------------------------------------------
def grid_to_wall_model(k: int) -> InducedMinorModel:
    """Induced-minor model of W_m (m = k // 2) in the k x k grid.

    Wall row r sits on grid row y = 2r - 1 and wall column c on grid column
    x = 2m + 1 - c. A wall vertex with a vertical edge downwards absorbs the
    grid vertex just below it (the shaded 2-boxes).
    """
    if k < 4:
        raise GraphError("grid_to_wall_model needs k >= 4")
    m = k // 2
    w = wall(m)
    gidx = grid(k).label_index()
    sets = []
    for c, r in w.labels:
        x, y = 2 * m + 1 - c, 2 * r - 1
        members = [gidx[(x, y)]]
        if r >= 2 and (c - (r - 1)) % 2 == 0:
            members.append(gidx[(x, y - 1)])
        sets.append(members)
    return InducedMinorModel.of(w, sets)


def wall_to_grid_model(k: int) -> InducedMinorModel:
    """Induced-minor model of the k x k grid in W_k: contract column pairs (2p-1, 2p)."""
    if k < 2:
        raise GraphError("wall_to_grid_model needs k >= 2")
    w = wall(k)
    widx = w.label_index()
    g = grid(k)
    sets = []
    for x, y in g.labels:
        sets.append([widx[p] for p in ((2 * x - 1, y), (2 * x, y)) if p in widx])
    return InducedMinorModel.of(g, sets)


# -- embeddings of small walls into a big one ----------------------------------------------
@dataclass(frozen=True)
class SubwallEmbedding:
    """A subdivision of W_m as an induced subgraph of W_K.

    ``place[(c, r)]`` is the W_K point of W_m vertex (c, r); ``vertices`` is
    the whole W_K point set.
    """

    m: int
    big: int
    place: Dict[Point, Point]
    vertices: FrozenSet[Point]


def _finish_embedding(m: int, big: int, place: Dict[Point, Point], extra: Set[Point]) -> SubwallEmbedding:
    small = wall(m)
    pts = set(extra)
    rows: Dict[int, List[int]] = {}
    for p in place.values():
        rows.setdefault(p[1], []).append(p[0])
    for y, xs in rows.items():
        pts.update((x, y) for x in range(min(xs), max(xs) + 1))
    big_pts = set(wall(big).labels)
    missing = pts - big_pts
    if missing:
        raise GraphError(f"W_{big} is too small to host the W_{m} pattern (needs {min(missing)})")
    emb = SubwallEmbedding(m, big, place, frozenset(pts))
    _check_embedding(emb, small)
    return emb


def _check_embedding(emb: SubwallEmbedding, small: Graph) -> None:
    """The embedded point set must induce a subdivision of W_m with the given placement."""
    big = wall(emb.big)
    idx = big.label_index()
    sub, _ = induced_subgraph(big, [idx[p] for p in emb.vertices])
    branch_pts = set(emb.place.values())
    lab = sub.labels
    deg_ok = all(sub.degree(v) == 2 or lab[v] in branch_pts for v in sub.vertices())
    if not deg_ok:
        raise AssertionError("embedding has a stray branch point")
    # every small edge is realized by a path of degree-2 points
    pos = {p: v for v, p in enumerate(lab)}
    inv = {q: p for p, q in emb.place.items()}
    seen_edges = set()
    for p, q in emb.place.items():
        v = pos[q]
        for nb in sub.neighbors(v):
            prev, cur = v, nb
            while lab[cur] not in branch_pts:
                nxt = [x for x in sub.neighbors(cur) if x != prev]
                prev, cur = cur, nxt[0]
            a, b = p, inv[lab[cur]]
            seen_edges.add((min(a, b), max(a, b)))
    sidx = small.label_index()
    want = {tuple(sorted((small.labels[u], small.labels[v]))) for u, v in small.edges}
    if seen_edges != want or len(branch_pts) != small.n or sub.m - sub.n != small.m - small.n:
        raise AssertionError("embedding does not realize the small wall")
    del sidx


def subwall_third(k: int) -> SubwallEmbedding:
    """W_m with m = k // 3 inside W_k, rows and columns spaced by three.

    Small vertex (c, r) sits at (3c - 2, 3r - 2); a vertical edge climbs
    through the zigzag (x, a+1), (x+1, a+1), (x+1, a+2), (x, a+2). Every
    small edge becomes a path of at least three edges.
    """
    m = k // 3
    if m < 2:
        raise GraphError("need k >= 6 for a W_2 subwall")
    small = wall(m)
    place = {(c, r): (3 * c - 2, 3 * r - 2) for c, r in small.labels}
    extra: Set[Point] = set()
    for c, r in small.labels:
        if r < m and (c - r) % 2 == 0:
            x, a = place[(c, r)]
            extra |= {(x, a + 1), (x + 1, a + 1), (x + 1, a + 2), (x, a + 2)}
    return _finish_embedding(m, k, place, extra)


def subwall_sparse(big: int, w: int, spacing: int) -> SubwallEmbedding:
    """W_w inside W_big on every other row, columns ``spacing`` apart (rounded up to even).

    A vertical edge from (b, a) steps to (b, a+1), (b+1, a+1) and lands on
    (b+1, a+2), so small vertices with a downward edge sit one column right.
    """
    step = spacing + (spacing % 2)
    small = wall(w)
    place = {}
    extra: Set[Point] = set()
    for c, r in small.labels:
        b = 1 + step * (c - 1)
        a = 2 * r - 1
        place[(c, r)] = (b, a) if (c - r) % 2 == 0 else (b + 1, a)
        if r < w and (c - r) % 2 == 0:
            extra |= {(b, a + 1), (b + 1, a + 1)}
    return _finish_embedding(w, big, place, extra)


# -- planted hosts ------------------------------------------------------------------------------
def planted_wall_host(k: int, seed: int, ell: int = 2, spread: int = 2,
                      adversarial: int = 0) -> Tuple[Graph, InducedMinorModel]:
    """(>= ell)-subdivision of W_k together with an induced-minor model of W_k.

    Each subdivided edge is split at a random point between its two end
    branch sets. With ``adversarial > 0`` that many degree-3 vertices of the
    W_{k//3} subwall are replaced by short paths whose third neighbour
    attaches mid-path (cycling through the x = y, triangle and smoothing
    cases of the extraction).
    """
    if ell < 2:
        raise GraphError("planted hosts need ell >= 2")
    w = wall(k)
    rng = random.Random(seed)
    base, spec = subdivide(w, ell, mode="at-least", seed=rng.randrange(1 << 30), spread=spread)
    sets: List[List[int]] = [[v] for v in range(w.n)]
    idx = w.label_index()
    targets: List[int] = []
    if adversarial:
        emb = subwall_third(k)
        small = wall(emb.m)
        deg3 = [idx[emb.place[small.labels[v]]] for v in small.vertices() if small.degree(v) == 3]
        if adversarial > len(deg3):
            raise GraphError(f"only {len(deg3)} subwall vertices can be made adversarial")
        targets = sorted(rng.sample(deg3, adversarial))
    tset = set(targets)
    for (a, b), path in spec.paths.items():
        inner = list(path[1:-1])
        if a in tset:
            cut = 0
        elif b in tset:
            cut = len(inner)
        else:
            cut = rng.randint(0, len(inner))
        sets[a].extend(inner[:cut])
        sets[b].extend(inner[cut:])
    if not targets:
        return base, InducedMinorModel.of(w, sets)
    edges = set(base.edges)
    nxt = base.n
    variants = [(3, 1, 1), (2, 0, 1), (5, 1, 3), (4, 0, 3)]
    for t, v in enumerate(targets):
        nbrs = sorted(base.neighbors(v))
        rng.shuffle(nbrs)
        n1, n2, n3 = nbrs
        length, i, j = variants[t % len(variants)]
        chain = [v] + list(range(nxt, nxt + length - 1))
        nxt += length - 1
        for x in nbrs:
            edges.discard((min(v, x), max(v, x)))
        edges.update((min(p, q), max(p, q)) for p, q in zip(chain, chain[1:]))
        for p, q in ((chain[0], n1), (chain[-1], n2), (chain[i], n3), (chain[j], n3)):
            edges.add((min(p, q), max(p, q)))
        sets[v] = chain
    return Graph(nxt, edges), InducedMinorModel.of(w, sets)


# -- extraction ---------------------------------------------------------------------------------
def _path_order(host: Graph, b: FrozenSet[int]) -> List[int]:
    if len(b) == 1:
        return list(b)
    ends = [v for v in b if len(host.neighbors(v) & b) == 1]
    start = min(ends)
    order = [start]
    prev = None
    cur = start
    while True:
        nxt = [x for x in host.neighbors(cur) & b if x != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def _triangle_in(host: Graph, b: Iterable[int]) -> Tuple[int, int, int]:
    for x, y, z in combinations(sorted(b), 3):
        if host.has_edge(x, y) and host.has_edge(y, z) and host.has_edge(x, z):
            return (x, y, z)
    raise AssertionError("no triangle in line-of-tripod branch set")


def trace_quasi_subdivision(host: Graph, keep: Set[int], pattern: Graph,
                            anchors: Sequence[Tuple[int, ...]], wall_index: Optional[int] = None) -> QuasiSubdivision:
    """Re-derive ports and direct paths by walking host[keep] between anchors."""
    owner = {}
    for p, a in enumerate(anchors):
        for v in a:
            owner[v] = p
    ports: Dict[Tuple[int, int], int] = {}
    paths: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for p, a in enumerate(anchors):
        aset = set(a)
        for v in a:
            for nb in sorted(host.neighbors(v) & keep):
                if nb in aset:
                    continue
                prev, cur = v, nb
                inner = []
                while cur not in owner:
                    inner.append(cur)
                    nxt = [x for x in host.neighbors(cur) & keep if x != prev]
                    if len(nxt) != 1:
                        raise GraphError(f"vertex {cur} does not lie on a direct path")
                    prev, cur = cur, nxt[0]
                q = owner[cur]
                if q == p:
                    raise GraphError(f"direct path returns to anchor of {p}")
                if (p, q) in ports and ports[(p, q)] != v:
                    raise GraphError(f"two direct paths between {p} and {q}")
                ports[(p, q)] = v
                e = (min(p, q), max(p, q))
                paths[e] = tuple(inner) if p < q else tuple(reversed(inner))
    return QuasiSubdivision(pattern, tuple(tuple(a) for a in anchors), ports, paths, wall_index)


@dataclass
class Extraction:
    """Output of :func:`extract_wall_quasi_subdivision` with its intermediate models."""

    witness: QuasiSubdivision
    subwall: SubwallEmbedding
    minimal_model: InducedMinorModel
    shapes: Dict[int, str]
    triangles: int
    smoothed: int


def extract_wall_quasi_subdivision(host: Graph, model: InducedMinorModel) -> Extraction:
    """Induced quasi-subdivision of W_{k//3} from an induced-minor model of W_k.

    The model is restricted to a (>=3)-subdivision H of W_{k//3} sitting
    inside W_k, made minimal, and every degree-3 branch set that induces a
    path is cut between the extreme contacts x, y of its third neighbour
    (keeping a triangle when x, y are adjacent).
    """
    bad = validate_model(host, model, induced=True)
    if bad:
        raise GraphError(f"invalid wall model: {bad}")
    pat = model.pattern
    k = None
    for cand in range(2, 200):
        if 2 * cand * cand - 2 == pat.n:
            k = cand
            break
    if k is None or pat != wall(k):
        raise GraphError("model pattern is not a wall")
    if k < 6:
        raise GraphError("extraction needs k >= 6")
    big = wall(k)
    bidx = big.label_index()
    emb = subwall_third(k)
    hverts = sorted(bidx[p] for p in emb.vertices)
    hgraph, hmap = induced_subgraph(big, hverts)
    hmodel = InducedMinorModel(hgraph, tuple(model.branch_sets[v] for v in hverts), True)
    minimal = refine_to_minimal(host, hmodel)
    sets = minimal.branch_sets
    shapes = {}
    for h in hgraph.vertices():
        shape = branch_set_shape(host, sets[h])
        if shape is None:
            raise AssertionError(f"minimal branch set {h} is not a path, tripod or line of tripod")
        shapes[h] = shape

    keep: Set[int] = set().union(*sets)
    hanchor: Dict[int, Tuple[int, ...]] = {}
    triangles = smoothed = 0
    for h in hgraph.vertices():
        b = sets[h]
        if hgraph.degree(h) != 3:
            continue
        if shapes[h] == "tripod":
            hanchor[h] = tuple(v for v in b if len(host.neighbors(v) & b) == 3)
            continue
        if shapes[h] == "line-of-tripod":
            hanchor[h] = _triangle_in(host, b)
            triangles += 1
            continue
        order = _path_order(host, b)
        if len(order) == 1:
            hanchor[h] = (order[0],)
            continue
        nbrs = sorted(hgraph.neighbors(h))
        contacts = {}
        for nb in nbrs:
            contacts[nb] = [t for t, v in enumerate(order) if host.neighbors(v) & sets[nb]]
        last = len(order) - 1
        third = None
        for bu, bv, b3 in permutations(nbrs):
            if contacts[bu] == [0] and contacts[bv] == [last]:
                third = b3
                break
        if third is None:
            raise AssertionError(f"path branch set {h} lacks exclusive end contacts")
        x, y = contacts[third][0], contacts[third][-1]
        zs = set().union(*(host.neighbors(order[t]) & sets[third] for t in (x, y)))
        if x == y:
            hanchor[h] = (order[x],)
        elif len(zs) != 1:
            raise AssertionError("third neighbour touches the path in more than one vertex")
        elif y == x + 1:
            hanchor[h] = (order[x], order[y], zs.pop())
            triangles += 1
        else:
            keep -= set(order[x + 1:y])
            hanchor[h] = (zs.pop(),)
            smoothed += 1

    small = wall(emb.m)
    anchors = []
    for c, r in small.labels:
        h = hmap[bidx[emb.place[(c, r)]]]
        anchors.append(hanchor.get(h, (min(sets[h]),)))
    qs = trace_quasi_subdivision(host, keep, small, anchors, wall_index=emb.m)
    bad = check_quasi_subdivision(host, qs)
    if bad:
        raise AssertionError(f"extracted witness fails validation: {bad}")
    return Extraction(qs, emb, minimal, shapes, triangles, smoothed)


def quasi_subdivision_model(qs: QuasiSubdivision) -> InducedMinorModel:
    """Induced-minor model of the pattern: each anchor absorbs the paths to larger neighbours."""
    sets = [set(a) for a in qs.anchors]
    for (p, q), inner in qs.paths.items():
        sets[p].update(inner)
    return InducedMinorModel.of(qs.pattern, sets)


# -- thinning -------------------------------------------------------------------------------------
@dataclass
class Thinning:
    vertices: List[int]
    witness: QuasiSubdivision
    model: InducedMinorModel
    spacing: int
    edges: int
    degree3: int
    two_connected: bool

    @property
    def n(self) -> int:
        return len(self.vertices)

    def density(self) -> Fraction:
        return Fraction(self.edges, self.n)


def _witness_lookup(qs: QuasiSubdivision):
    labels = qs.pattern.labels
    pos = {lab: i for i, lab in enumerate(labels)}
    return pos


def thin_to_sparse_wall(host: Graph, qs: QuasiSubdivision, w: int, eps: Fraction) -> Thinning:
    """Sparse 2-connected induced subgraph containing a subdivision of W_w.

    Keeps every other wall row and columns ``ceil(4/eps) + 1`` apart of the
    planted W_K, then maps the chosen W_K vertices and edges back to host
    anchors and direct paths.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise GraphError("eps must be positive")
    if qs.wall_index is None or qs.pattern != wall(qs.wall_index):
        raise GraphError("witness is not a wall quasi-subdivision")
    bad = check_quasi_subdivision(host, qs)
    if bad:
        raise GraphError(f"invalid witness: {bad}")
    big = qs.wall_index
    spacing = math.ceil(4 / eps) + 1
    emb = subwall_sparse(big, w, spacing)
    pos = _witness_lookup(qs)
    chosen = {pos[p] for p in emb.vertices}
    pat = qs.pattern
    keep: Set[int] = set()
    for v in chosen:
        a = qs.anchors[v]
        if len(a) == 1:
            keep.add(a[0])
        else:
            keep.update(qs.ports[(v, u)] for u in pat.neighbors(v) if u in chosen)
    for (p, q), inner in qs.paths.items():
        if p in chosen and q in chosen:
            keep.update(inner)
    small = wall(w)
    anchors = []
    for c, r in small.labels:
        v = pos[emb.place[(c, r)]]
        a = qs.anchors[v]
        if len(a) == 3 and small.degree(small.label_index()[(c, r)]) == 3:
            anchors.append(a)
        else:
            anchors.append((min(x for x in a if x in keep),))
    wit = trace_quasi_subdivision(host, keep, small, anchors, wall_index=w)
    bad = check_quasi_subdivision(host, wit)
    if bad:
        raise AssertionError(f"thinned witness fails validation: {bad}")
    sub, _ = induced_subgraph(host, keep)
    model = quasi_subdivision_model(wit)
    return Thinning(sorted(keep), wit, model, spacing, sub.m,
                    sum(1 for v in sub.vertices() if sub.degree(v) == 3), is_two_connected(sub))
