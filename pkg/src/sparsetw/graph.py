"""Immutable simple graphs on vertices 0..n-1 and elementary measures.

Every derivation returns a fresh :class:`Graph` together with an explicit
map back to its parent, so chains of induced subgraphs / minors can be
composed back to the original host.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

Edge = Tuple[int, int]


class GraphError(ValueError):
    """Malformed graph input or violated operation precondition."""


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph with canonical integer vertex ids.

    ``labels`` optionally carries one hashable label per vertex (grid
    coordinates, skeleton ids, ...). Instances are never mutated.
    """

    __slots__ = ("_n", "_edges", "_adj", "_masks", "_labels", "_hash")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = (), labels: Optional[Sequence] = None):
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        es = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            es.add(_norm(u, v))
        adj: List[set] = [set() for _ in range(n)]
        for u, v in es:
            adj[u].add(v)
            adj[v].add(u)
        self._n = n
        self._edges = frozenset(es)
        self._adj = tuple(frozenset(a) for a in adj)
        self._masks = tuple(sum(1 << w for w in a) for a in adj)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise GraphError("labels must have one entry per vertex")
        self._labels = labels
        self._hash = None

    # -- basic accessors -------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    vertex_count = n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    @property
    def labels(self) -> Optional[tuple]:
        return self._labels

    def vertices(self) -> range:
        return range(self._n)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self._edges)

    def neighbors(self, v: int) -> FrozenSet[int]:
        return self._adj[v]

    def mask(self, v: int) -> int:
        """Neighborhood of ``v`` as a bitmask."""
        return self._masks[v]

    @property
    def masks(self) -> Tuple[int, ...]:
        return self._masks

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def label_index(self) -> Dict:
        if self._labels is None:
            raise GraphError("graph carries no labels")
        return {lab: i for i, lab in enumerate(self._labels)}

    def with_labels(self, labels: Optional[Sequence]) -> "Graph":
        return Graph(self._n, self._edges, labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, self._edges))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"

    # -- set helpers -----------------------------------------------------
    def set_mask(self, s: Iterable[int]) -> int:
        out = 0
        for v in s:
            out |= 1 << v
        return out

    def neighborhood_mask(self, s_mask: int) -> int:
        """Open neighborhood N(S) of a vertex bitmask."""
        out = 0
        for v in iter_bits(s_mask):
            out |= self._masks[v]
        return out & ~s_mask

    def is_connected_set(self, s: Iterable[int]) -> bool:
        return is_connected_mask(self, self.set_mask(s))

    def components(self, within: Optional[Iterable[int]] = None) -> List[List[int]]:
        """Connected components (sorted lists) of G, or of G[within]."""
        allowed = self.set_mask(within) if within is not None else (1 << self._n) - 1
        comps = []
        rest = allowed
        while rest:
            low = rest & -rest
            comp = reach_mask(self, low, allowed)
            comps.append(list(iter_bits(comp)))
            rest &= ~comp
        return comps


# -- bitmask utilities -----------------------------------------------------
def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def reach_mask(g: Graph, start: int, allowed: int) -> int:
    """Vertices of ``allowed`` reachable from bitmask ``start`` inside G[allowed]."""
    masks = g.masks
    seen = start & allowed
    frontier = seen
    while frontier:
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= masks[v]
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_connected_mask(g: Graph, s: int) -> bool:
    if s == 0:
        return False
    return reach_mask(g, s & -s, s) == s


# -- constructors ------------------------------------------------------------
def complete_graph(t: int) -> Graph:
    return Graph(t, [(i, j) for i in range(t) for j in range(i + 1, t)])


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with sides 0..a-1 and a..a+b-1."""
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def empty_graph(n: int) -> Graph:
    return Graph(n)


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    off = 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges)
        off += g.n
    return Graph(off, edges)


# -- operations ----------------------------------------------------------------
def induced_subgraph(g: Graph, s: Iterable[int]) -> Tuple[Graph, Dict[int, int]]:
    """G[S] with vertices renumbered in increasing old-id order.

    Returns the subgraph and the old->new id map.
    """
    verts = sorted(set(s))
    for v in verts:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    idx = {v: i for i, v in enumerate(verts)}
    edges = [(idx[u], idx[v]) for u, v in g.edges if u in idx and v in idx]
    labels = [g.labels[v] for v in verts] if g.labels is not None else None
    return Graph(len(verts), edges, labels), idx


def contract_edge(g: Graph, u: int, v: int) -> Tuple[Graph, Dict[int, int]]:
    """Contract edge uv; the merged vertex takes the smaller id's slot.

    Returns the contracted graph and the old->new id map (u and v both map
    to the merged vertex).
    """
    if not g.has_edge(u, v):
        raise GraphError(f"({u}, {v}) is not an edge")
    keep, gone = min(u, v), max(u, v)
    idx = {}
    for w in range(g.n):
        if w == gone:
            continue
        idx[w] = w if w < gone else w - 1
    idx[gone] = idx[keep]
    edges = set()
    for a, b in g.edges:
        x, y = idx[a], idx[b]
        if x != y:
            edges.add(_norm(x, y))
    return Graph(g.n - 1, edges), idx


def is_two_connected(g: Graph) -> bool:
    """At least 3 vertices, connected, no cut vertex."""
    n = g.n
    if n < 3:
        return False
    full = (1 << n) - 1
    if not is_connected_mask(g, full):
        return False
    return not articulation_points(g)


def articulation_points(g: Graph) -> List[int]:
    """Cut vertices via iterative Hopcroft-Tarjan lowpoints."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    cut = set()
    t = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = t
        t += 1
        children = 0
        stack = [(root, -1, iter(sorted(g.neighbors(root))))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if disc[w] == -1:
                    disc[w] = low[w] = t
                    t += 1
                    if v == root:
                        children += 1
                    stack.append((w, v, iter(sorted(g.neighbors(w)))))
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[v])
                if p != root and low[v] >= disc[p]:
                    cut.add(p)
        if children > 1:
            cut.add(root)
    return sorted(cut)


def degeneracy(g: Graph) -> Tuple[int, List[int]]:
    """Degeneracy and a witnessing elimination order.

    Repeatedly removes a minimum-degree vertex (smallest id on ties); each
    vertex has at most ``d`` neighbors later in the returned order.
    """
    deg = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    order = []
    d = 0
    for _ in range(g.n):
        v = min((x for x in range(g.n) if alive[x]), key=lambda x: (deg[x], x))
        d = max(d, deg[v])
        order.append(v)
        alive[v] = False
        for w in g.neighbors(v):
            if alive[w]:
                deg[w] -= 1
    return d, order


def edge_density(g: Graph) -> Fraction:
    """|E|/|V| as an exact rational."""
    if g.n == 0:
        raise GraphError("edge density of the empty graph is undefined")
    return Fraction(g.m, g.n)


def has_biclique_subgraph(g: Graph, t: int) -> Optional[Tuple[List[int], List[int]]]:
    """Disjoint A, B with |A| = |B| = t and every A-B pair adjacent, or None.

    Exact backtracking over t-subsets A, pruning on the size of the common
    neighborhood; B is then any t vertices of that neighborhood.
    """
    if t < 1:
        raise GraphError("t must be at least 1")
    n = g.n
    masks = g.masks
    cand = [v for v in range(n) if g.degree(v) >= t]

    def rec(start: int, chosen: List[int], common: int) -> Optional[Tuple[List[int], List[int]]]:
        if len(chosen) == t:
            return list(chosen), list(iter_bits(common))[:t]
        for i in range(start, len(cand)):
            if len(cand) - i < t - len(chosen):
                break
            v = cand[i]
            nc = common & masks[v]
            if popcount(nc) < t:
                continue
            chosen.append(v)
            res = rec(i + 1, chosen, nc)
            chosen.pop()
            if res is not None:
                return res
        return None

    return rec(0, [], (1 << n) - 1)


def line_graph(g: Graph) -> Tuple[Graph, List[Edge]]:
    """Line graph; vertex i stands for the i-th edge in sorted edge order."""
    es = g.sorted_edges()
    at: Dict[int, List[int]] = {}
    for i, (u, v) in enumerate(es):
        at.setdefault(u, []).append(i)
        at.setdefault(v, []).append(i)
    edges = set()
    for ids in at.values():
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                edges.add(_norm(ids[a], ids[b]))
    return Graph(len(es), edges), es


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with vertex v renamed perm[v]."""
    return Graph(g.n, [(perm[u], perm[v]) for u, v in g.edges])
