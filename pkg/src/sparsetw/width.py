"""Exact small-scale oracles: tree decompositions, treewidth, bramble order, expansion.

Nothing here is heuristic: every reported width is exact, and instances
beyond the configured caps are refused with :class:`CapExceeded`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .graph import Graph, GraphError, is_connected_mask, iter_bits, popcount, reach_mask

TREEWIDTH_CAP = 24
HITTING_SET_CAP = 200_000
NABLA_VERTEX_CAP = 12
NABLA_DEPTH_CAP = 2


class CapExceeded(GraphError):
    """Instance exceeds the exact-oracle size cap."""


@dataclass(frozen=True)
class TreeDecomposition:
    tree: Graph
    bags: Tuple[FrozenSet[int], ...]

    @classmethod
    def from_bags(cls, bags: Sequence[Iterable[int]], tree_edges: Iterable[Sequence[int]]) -> "TreeDecomposition":
        return cls(Graph(len(bags), tree_edges), tuple(frozenset(b) for b in bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adhesion_size(self) -> int:
        """max |bag(x) & bag(y)| over all distinct node pairs, adjacent or not."""
        return max((len(a & b) for a, b in combinations(self.bags, 2)), default=0)

    def adhesions_of(self, x: int) -> List[FrozenSet[int]]:
        """Distinct non-empty intersections of bag(x) with every other bag."""
        out = []
        for y, b in enumerate(self.bags):
            if y != x:
                inter = self.bags[x] & b
                if inter and inter not in out:
                    out.append(inter)
        return out

    def nodes_containing(self, v: int) -> List[int]:
        return [x for x, b in enumerate(self.bags) if v in b]

    def to_json(self) -> dict:
        return {
            "nodes": list(range(self.tree.n)),
            "tree_edges": [list(e) for e in self.tree.sorted_edges()],
            "bags": [sorted(b) for b in self.bags],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TreeDecomposition":
        try:
            nodes = list(obj["nodes"])
            bags = obj["bags"]
            tree_edges = obj["tree_edges"]
        except (KeyError, TypeError):
            raise GraphError("tree decomposition JSON needs nodes, tree_edges, bags") from None
        if nodes != list(range(len(nodes))) or len(bags) != len(nodes):
            raise GraphError("tree decomposition nodes must be 0..N-1 with one bag each")
        return cls.from_bags(bags, tree_edges)


@dataclass(frozen=True)
class TDReport:
    ok: bool
    width: Optional[int] = None
    adhesion_size: Optional[int] = None
    violation: Optional[str] = None


def _is_tree(t: Graph) -> bool:
    return t.n >= 1 and t.m == t.n - 1 and is_connected_mask(t, (1 << t.n) - 1)


def validate_tree_decomposition(g: Graph, td: TreeDecomposition) -> TDReport:
    if not _is_tree(td.tree):
        return TDReport(False, violation="decomposition tree is not a tree")
    if len(td.bags) != td.tree.n:
        return TDReport(False, violation="one bag per tree node required")
    for x, b in enumerate(td.bags):
        bad = [v for v in b if not 0 <= v < g.n]
        if bad:
            return TDReport(False, violation=f"bag {x} holds unknown vertex {bad[0]}")
    for u, v in g.sorted_edges():
        if not any(u in b and v in b for b in td.bags):
            return TDReport(False, violation=f"edge ({u}, {v}) not covered by any bag")
    for v in g.vertices():
        nodes = td.nodes_containing(v)
        if not nodes:
            return TDReport(False, violation=f"vertex {v} appears in no bag")
        if not is_connected_mask(td.tree, td.tree.set_mask(nodes)):
            return TDReport(False, violation=f"bags containing vertex {v} do not form a subtree")
    return TDReport(True, td.width, td.adhesion_size())


# -- exact treewidth ------------------------------------------------------------
def _q_mask(g: Graph, s: int, v: int) -> int:
    """Later neighbors of v once the vertices of S are eliminated."""
    vb = 1 << v
    comp = reach_mask(g, vb, s | vb)
    return g.neighborhood_mask(comp)


def min_fill_order(g: Graph) -> List[int]:
    adj = [set(g.neighbors(v)) for v in g.vertices()]
    alive = set(g.vertices())
    order = []
    while alive:
        def fill(v):
            nb = [w for w in adj[v] if w in alive]
            return sum(1 for a, b in combinations(nb, 2) if b not in adj[a])
        v = min(alive, key=lambda x: (fill(x), len(adj[x] & alive), x))
        nb = [w for w in adj[v] if w in alive]
        for a, b in combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        alive.remove(v)
        order.append(v)
    return order


def order_width(g: Graph, order: Sequence[int]) -> int:
    s = 0
    width = -1
    for v in order:
        width = max(width, popcount(_q_mask(g, s, v)))
        s |= 1 << v
    return width


def _minor_min_width(g: Graph) -> int:
    """Contraction-degeneracy style lower bound (min-d contraction heuristic)."""
    adj = {v: set(g.neighbors(v)) for v in g.vertices()}
    lb = 0
    while len(adj) > 1:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        lb = max(lb, len(adj[v]))
        if not adj[v]:
            del adj[v]
            continue
        u = min(adj[v], key=lambda x: (len(adj[x]), x))
        for w in adj[v]:
            if w != u:
                adj[w].discard(v)
                adj[w].add(u)
                adj[u].add(w)
        adj[u].discard(v)
        del adj[v]
    return lb


def _decide(g: Graph, k: int, budget: Optional[int]) -> Optional[List[int]]:
    """Elimination order of width <= k, or None. Memoizes dead eliminated-sets."""
    n = g.n
    full = (1 << n) - 1
    dead = set()
    counter = [0]

    def rec(s: int, order: List[int]) -> bool:
        if n - popcount(s) <= k + 1:
            order.extend(iter_bits(full & ~s))
            return True
        if s in dead:
            return False
        counter[0] += 1
        if budget is not None and counter[0] > budget:
            raise CapExceeded("treewidth search budget exhausted")
        cands = []
        for v in iter_bits(full & ~s):
            q = popcount(_q_mask(g, s, v))
            if q <= k:
                cands.append((q, v))
        cands.sort()
        for q, v in cands:
            order.append(v)
            if rec(s | (1 << v), order):
                return True
            order.pop()
            # an eliminable vertex of degree <= 1 in the filled graph never hurts
            if q <= 1:
                break
        dead.add(s)
        return False

    order: List[int] = []
    return order if rec(0, order) else None


def decomposition_from_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Tree decomposition with one bag per vertex of the elimination order."""
    n = g.n
    if n == 0:
        return TreeDecomposition.from_bags([()], [])
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    parent: List[Optional[int]] = []
    s = 0
    for v in order:
        q = list(iter_bits(_q_mask(g, s, v)))
        bags.append([v] + q)
        parent.append(min((pos[w] for w in q), default=None))
        s |= 1 << v
    edges = [(i, p) for i, p in enumerate(parent) if p is not None]
    roots = [i for i, p in enumerate(parent) if p is None]
    edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition.from_bags(bags, edges)


def exact_treewidth(g: Graph, cap: int = TREEWIDTH_CAP, budget: Optional[int] = None) -> Tuple[int, TreeDecomposition]:
    """Exact treewidth plus a decomposition of that width.

    Iterative deepening between a contraction lower bound and the min-fill
    upper bound; each level searches elimination orders over subsets.
    """
    if g.n > cap:
        raise CapExceeded(f"exact treewidth capped at {cap} vertices, got {g.n}")
    if g.n == 0:
        return -1, decomposition_from_order(g, [])
    ub_order = min_fill_order(g)
    ub = order_width(g, ub_order)
    lb = max(_minor_min_width(g), 0)
    best = ub_order
    for k in range(lb, ub):
        order = _decide(g, k, budget)
        if order is not None:
            best = order
            break
    td = decomposition_from_order(g, best)
    return td.width, td


# -- brambles ---------------------------------------------------------------------
@dataclass(frozen=True)
class Bramble:
    sets: Tuple[FrozenSet[int], ...]

    @classmethod
    def of(cls, sets: Iterable[Iterable[int]]) -> "Bramble":
        return cls(tuple(frozenset(s) for s in sets))

    def to_json(self) -> dict:
        return {"sets": [sorted(s) for s in self.sets]}

    @classmethod
    def from_json(cls, obj: dict) -> "Bramble":
        try:
            return cls.of(obj["sets"])
        except (KeyError, TypeError):
            raise GraphError("bramble JSON needs 'sets'") from None


def touch(g: Graph, a: Iterable[int], b: Iterable[int]) -> bool:
    ma, mb = g.set_mask(a), g.set_mask(b)
    return bool(ma & mb) or bool(g.neighborhood_mask(ma) & mb)


def validate_bramble(g: Graph, b: Bramble) -> Optional[str]:
    for i, s in enumerate(b.sets):
        if any(not 0 <= v < g.n for v in s):
            return f"set {i} has a vertex out of range"
        if not s or not g.is_connected_set(s):
            return f"set {i} is not connected"
    for i, j in combinations(range(len(b.sets)), 2):
        if not touch(g, b.sets[i], b.sets[j]):
            return f"sets {i} and {j} do not touch"
    return None


def min_hitting_set(sets: Sequence[Iterable[int]], cap: int = HITTING_SET_CAP) -> List[int]:
    """Exact minimum hitting set by branching on the smallest unhit set.

    Memoized on the set of still-unhit sets; vertices dominated within the
    branching set are skipped.
    """
    sets = [frozenset(s) for s in sets]
    if any(not s for s in sets):
        raise GraphError("an empty set cannot be hit")
    universe = sorted(set().union(*sets)) if sets else []
    if len(universe) * max(len(sets), 1) > cap:
        raise CapExceeded(f"hitting-set instance {len(universe)}x{len(sets)} exceeds cap {cap}")
    cover = {v: sum(1 << i for i, s in enumerate(sets) if v in s) for v in universe}
    members = [sorted(s) for s in sets]
    memo: Dict[int, Tuple[int, ...]] = {}

    def solve(unhit: int) -> Tuple[int, ...]:
        if unhit == 0:
            return ()
        got = memo.get(unhit)
        if got is not None:
            return got
        pick = min(iter_bits(unhit), key=lambda i: (len(members[i]), i))
        cand = members[pick]
        covs = {v: cover[v] & unhit for v in cand}
        keep = [v for v in cand
                if not any(w != v and covs[v] & ~covs[w] == 0 and (covs[v] != covs[w] or w < v) for w in cand)]
        best = None
        for v in sorted(keep, key=lambda x: -popcount(covs[x])):
            sub = solve(unhit & ~covs[v])
            if best is None or len(sub) + 1 < len(best):
                best = (v,) + sub
        memo[unhit] = best
        return best

    return sorted(solve((1 << len(sets)) - 1))


def bramble_order(g: Graph, b: Bramble, cap: int = HITTING_SET_CAP) -> Tuple[int, List[int]]:
    """Order of a validated bramble and a minimum hitting set."""
    bad = validate_bramble(g, b)
    if bad:
        raise GraphError(f"invalid bramble: {bad}")
    hs = min_hitting_set(b.sets, cap)
    return len(hs), hs


def grid_bramble(k: int) -> Bramble:
    """Bramble of order k+1 on the k x k grid (ids as in constructions.grid).

    Crosses of the top-left (k-1) x (k-1) subgrid, plus the last row and
    the last column without its corner.
    """
    if k < 2:
        raise GraphError("grid bramble needs k >= 2")
    vid = lambda i, j: (i - 1) * k + (j - 1)
    sets = []
    for i in range(1, k):
        for j in range(1, k):
            cross = {vid(i, t) for t in range(1, k)} | {vid(t, j) for t in range(1, k)}
            sets.append(cross)
    sets.append({vid(k, t) for t in range(1, k + 1)})
    sets.append({vid(t, k) for t in range(1, k)})
    return Bramble.of(sets)


# -- lower bounds from minor witnesses ----------------------------------------------
def witness_family(pattern: Graph) -> Optional[Tuple[str, int]]:
    """Recognize the pattern as one of the canonical constructions."""
    from .constructions import grid, wall
    from .graph import complete_bipartite, complete_graph

    n = pattern.n
    r = int(round(n ** 0.5))
    if r * r == n and r >= 1 and pattern == grid(r):
        return ("grid", r)
    for k in range(2, n):
        if 2 * k * k - 2 == n and pattern == wall(k):
            return ("wall", k)
        if 2 * k * k - 2 > n:
            break
    if n % 2 == 0 and n >= 2 and pattern == complete_bipartite(n // 2, n // 2):
        return ("biclique", n // 2)
    if pattern == complete_graph(n):
        return ("clique", n)
    return None


def tw_lower_bound_from_witness(g: Graph, model) -> int:
    """Treewidth lower bound certified by a minor model of a known family.

    Grid Γ_k gives k, wall W_k gives k (it has Γ_k as an induced minor),
    K_{s,s} gives s and K_s gives s-1.
    """
    from .minors import validate_model

    bad = validate_model(g, model, induced=False)
    if bad:
        raise GraphError(f"invalid witness: {bad}")
    fam = witness_family(model.pattern)
    if fam is None:
        raise GraphError("witness pattern is not a grid, wall, biclique or clique")
    kind, k = fam
    if kind == "grid":
        return k if k >= 2 else k - 1
    if kind in ("wall", "biclique"):
        return k
    return k - 1


# -- expansion ----------------------------------------------------------------------
def _radius_at_most(g: Graph, s: int, r: int) -> bool:
    for c in iter_bits(s):
        seen = 1 << c
        frontier = seen
        for _ in range(r):
            nxt = g.neighborhood_mask(frontier) & s & ~seen
            seen |= nxt
            frontier = nxt
        if seen == s:
            return True
    return False


def _connected_sets_with(g: Graph, root: int, allowed: int, r: int) -> List[int]:
    """Connected subsets of ``allowed`` containing ``root`` with induced radius <= r."""
    out = []
    seen = {1 << root}
    stack = [1 << root]
    while stack:
        s = stack.pop()
        if _radius_at_most(g, s, r):
            out.append(s)
        for v in iter_bits(g.neighborhood_mask(s) & allowed):
            t = s | (1 << v)
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return out


def _densest_subgraph(q: int, qedges: List[Tuple[int, int]]) -> Fraction:
    best = Fraction(0)
    for sub in range(1, 1 << q):
        e = sum(1 for a, b in qedges if sub >> a & 1 and sub >> b & 1)
        d = Fraction(e, popcount(sub))
        if d > best:
            best = d
    return best


def nabla_r(g: Graph, r: int) -> Fraction:
    """Exact ∇_r: max edge density over depth-r minors (tiny graphs only).

    Enumerates partitions of V into connected blocks whose induced radius
    is at most r; every depth-r minor is a subgraph of one such quotient.
    """
    if g.n > NABLA_VERTEX_CAP or r > NABLA_DEPTH_CAP or r < 0:
        raise CapExceeded(f"nabla_r needs n <= {NABLA_VERTEX_CAP} and 0 <= r <= {NABLA_DEPTH_CAP}")
    if g.n == 0:
        return Fraction(0)
    full = (1 << g.n) - 1
    best = Fraction(0)
    cache: Dict[frozenset, Fraction] = {}

    def rec(rest: int, blocks: List[int]):
        nonlocal best
        if rest == 0:
            idx = {}
            for t, bl in enumerate(blocks):
                for v in iter_bits(bl):
                    idx[v] = t
            qedges = sorted({(min(idx[u], idx[v]), max(idx[u], idx[v])) for u, v in g.edges if idx[u] != idx[v]})
            key = (len(blocks), tuple(qedges))
            d = cache.get(key)
            if d is None:
                d = _densest_subgraph(len(blocks), qedges)
                cache[key] = d
            if d > best:
                best = d
            return
        root = (rest & -rest).bit_length() - 1
        for s in _connected_sets_with(g, root, rest, r):
            blocks.append(s)
            rec(rest & ~s, blocks)
            blocks.pop()

    rec(full, [])
    return best
