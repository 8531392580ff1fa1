"""Minor and induced-minor models, minimal refinement, and exact containment search.

Searches are three-valued (found / absent / budget-exhausted) so that a
timeout is never reported as absence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .graph import Graph, GraphError, is_connected_mask, iter_bits, popcount, reach_mask

FOUND = "found"
ABSENT = "absent"
EXHAUSTED = "budget-exhausted"

DEFAULT_BUDGET = 2_000_000
MAX_PATTERN = 6
MAX_HOST = 18


@dataclass(frozen=True)
class InducedMinorModel:
    """Branch sets of ``host`` indexed by pattern vertex (phi is positional)."""

    pattern: Graph
    branch_sets: Tuple[FrozenSet[int], ...]
    induced: bool = True

    @classmethod
    def of(cls, pattern: Graph, sets: Sequence[Iterable[int]], induced: bool = True) -> "InducedMinorModel":
        return cls(pattern, tuple(frozenset(s) for s in sets), induced)

    def union(self) -> FrozenSet[int]:
        return frozenset().union(*self.branch_sets) if self.branch_sets else frozenset()

    def to_json(self) -> dict:
        return {
            "pattern": {"n": self.pattern.n, "edges": [list(e) for e in self.pattern.sorted_edges()]},
            "branch_sets": [sorted(b) for b in self.branch_sets],
            "induced": self.induced,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InducedMinorModel":
        try:
            pat = Graph(int(obj["pattern"]["n"]), obj["pattern"]["edges"])
            return cls.of(pat, obj["branch_sets"], bool(obj.get("induced", True)))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed model JSON: {exc}") from None


@dataclass(frozen=True)
class SearchResult:
    status: str
    witness: object = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND


def validate_model(host: Graph, model: InducedMinorModel, induced: Optional[bool] = None) -> Optional[str]:
    """None if the model is valid, else a description of the first violation."""
    induced = model.induced if induced is None else induced
    pat = model.pattern
    sets = model.branch_sets
    if len(sets) != pat.n:
        return f"{len(sets)} branch sets for a {pat.n}-vertex pattern"
    masks = []
    used = 0
    for i, b in enumerate(sets):
        if not b:
            return f"branch set {i} is empty"
        if any(not 0 <= v < host.n for v in b):
            return f"branch set {i} has a vertex out of range"
        m = host.set_mask(b)
        if m & used:
            return f"branch set {i} overlaps an earlier branch set"
        used |= m
        if not is_connected_mask(host, m):
            return f"branch set {i} is not connected"
        masks.append(m)
    nbr = [host.neighborhood_mask(m) for m in masks]
    for i in range(pat.n):
        for j in range(i + 1, pat.n):
            adjacent = bool(nbr[i] & masks[j])
            if pat.has_edge(i, j) and not adjacent:
                return f"branch sets {i} and {j} must be adjacent"
            if induced and adjacent and not pat.has_edge(i, j):
                return f"branch sets {i} and {j} are adjacent but pattern has no edge"
    return None


def identity_model(g: Graph) -> InducedMinorModel:
    return InducedMinorModel.of(g, [[v] for v in g.vertices()])


def compose_models(outer: InducedMinorModel, inner: InducedMinorModel) -> InducedMinorModel:
    """Model of A in C from a model of A in B (outer) and of B in C (inner)."""
    if inner.pattern.n == 0 and outer.branch_sets:
        raise GraphError("inner model is empty")
    sets = [frozenset().union(*(inner.branch_sets[b] for b in s)) for s in outer.branch_sets]
    return InducedMinorModel(outer.pattern, tuple(sets), outer.induced and inner.induced)


def restrict_model(model: InducedMinorModel, keep: Iterable[int], pattern: Graph) -> InducedMinorModel:
    """Model of ``pattern`` (the induced subgraph of model.pattern on ``keep``, renumbered)."""
    keep = sorted(keep)
    return InducedMinorModel(pattern, tuple(model.branch_sets[v] for v in keep), model.induced)


# -- minimal refinement -------------------------------------------------------------
def _set_ok(host: Graph, mask: int, required: List[int]) -> bool:
    if not is_connected_mask(host, mask):
        return False
    nb = host.neighborhood_mask(mask)
    return all(nb & r for r in required)


def refine_to_minimal(host: Graph, model: InducedMinorModel, exhaustive_cap: int = 10) -> InducedMinorModel:
    """Shrink branch sets while the model stays valid.

    Greedy single-vertex deletion to a fixpoint, alternated with an exact
    minimum-size shrink of every branch set with at most ``exhaustive_cap``
    vertices (other sets fixed).
    """
    bad = validate_model(host, model)
    if bad:
        raise GraphError(f"invalid model: {bad}")
    pat = model.pattern
    masks = [host.set_mask(b) for b in model.branch_sets]

    def required(i: int) -> List[int]:
        return [masks[j] for j in pat.neighbors(i)]

    changed = True
    while changed:
        changed = False
        for i in range(pat.n):
            for v in sorted(iter_bits(masks[i]), reverse=True):
                trial = masks[i] & ~(1 << v)
                if trial and _set_ok(host, trial, required(i)):
                    masks[i] = trial
                    changed = True
        for i in range(pat.n):
            size = popcount(masks[i])
            if size <= 1 or size > exhaustive_cap:
                continue
            verts = list(iter_bits(masks[i]))
            req = required(i)
            done = False
            for k in range(1, size):
                for sub in combinations(verts, k):
                    trial = host.set_mask(sub)
                    if _set_ok(host, trial, req):
                        masks[i] = trial
                        changed = done = True
                        break
                if done:
                    break
    return InducedMinorModel(pat, tuple(frozenset(iter_bits(m)) for m in masks), model.induced)


def is_path_set(g: Graph, s: Iterable[int]) -> bool:
    sub = list(s)
    m = g.set_mask(sub)
    if not is_connected_mask(g, m):
        return False
    degs = [popcount(g.mask(v) & m) for v in sub]
    if len(sub) == 1:
        return True
    edges = sum(degs) // 2
    return edges == len(sub) - 1 and max(degs) <= 2


def is_tripod_set(g: Graph, s: Iterable[int]) -> bool:
    """G[s] is a subdivision of K_{1,3}."""
    sub = list(s)
    m = g.set_mask(sub)
    if not is_connected_mask(g, m):
        return False
    degs = [popcount(g.mask(v) & m) for v in sub]
    edges = sum(degs) // 2
    return (edges == len(sub) - 1 and degs.count(3) == 1 and degs.count(1) == 3
            and all(d in (1, 2, 3) for d in degs))


def is_line_of_tripod_set(g: Graph, s: Iterable[int]) -> bool:
    """G[s] is a triangle with a (possibly empty) path hanging from each corner."""
    sub = list(s)
    m = g.set_mask(sub)
    if not is_connected_mask(g, m):
        return False
    deg = {v: popcount(g.mask(v) & m) for v in sub}
    edges = sum(deg.values()) // 2
    if edges != len(sub) or max(deg.values()) > 3:
        return False
    tri = [v for v in sub if deg[v] == 3]
    if len(tri) == 3:
        a, b, c = tri
        return g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c) and list(deg.values()).count(1) == 3
    if len(sub) == 3 and not tri:
        return True
    # corners of degree 2 have empty pendant paths
    cyc = [v for v in sub if deg[v] >= 2]
    for a, b, c in combinations(cyc, 3):
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c):
            rest = m & ~g.set_mask((a, b, c))
            leaves = [v for v in sub if deg[v] == 1]
            corners3 = sum(1 for v in (a, b, c) if deg[v] == 3)
            return len(leaves) == corners3 and edges == len(sub) and (rest == 0 or corners3 > 0)
    return False


def branch_set_shape(g: Graph, s: Iterable[int]) -> Optional[str]:
    s = list(s)
    if is_path_set(g, s):
        return "path"
    if is_tripod_set(g, s):
        return "tripod"
    if is_line_of_tripod_set(g, s):
        return "line-of-tripod"
    return None


# -- induced minor search ---------------------------------------------------------------
def search_order(g: Graph) -> List[int]:
    """The fixed vertex order used by the searches: BFS by id, component by component."""
    seen = [False] * g.n
    order = []
    for root in g.vertices():
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        for v in queue:
            order.append(v)
            for w in sorted(g.neighbors(v)):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order


def automorphisms(g: Graph) -> List[Tuple[int, ...]]:
    """All automorphisms of a small graph, by backtracking."""
    n = g.n
    out = []
    img = [-1] * n
    used = [False] * n

    def rec(v: int) -> None:
        if v == n:
            out.append(tuple(img))
            return
        for t in range(n):
            if used[t] or g.degree(t) != g.degree(v):
                continue
            if all(g.has_edge(img[u], t) == g.has_edge(u, v) for u in range(v)):
                img[v] = t
                used[t] = True
                rec(v + 1)
                used[t] = False
        img[v] = -1

    rec(0)
    return out


def find_induced_minor(host: Graph, pattern: Graph, budget: int = DEFAULT_BUDGET, induced: bool = True,
                       max_pattern: int = MAX_PATTERN, max_host: int = MAX_HOST) -> SearchResult:
    """Exact search for an (induced) minor model of ``pattern`` in ``host``.

    Host vertices are decided in :func:`search_order`, each joining one of
    the pattern's branch sets (tried in pattern order) or being deleted
    (tried last). The first witness is the lexicographically least
    assignment vector under that order; partial assignments that some
    pattern automorphism maps to a smaller prefix are pruned, which never
    removes the least witness.
    """
    q = pattern.n
    n = host.n
    if q > max_pattern or n > max_host:
        return SearchResult(EXHAUSTED)
    if q == 0:
        return SearchResult(FOUND, InducedMinorModel.of(pattern, [], induced))
    if q > n:
        return SearchResult(ABSENT)
    order = search_order(host)
    hm = host.masks
    padj = [pattern.mask(i) for i in range(q)]
    auts = [a for a in automorphisms(pattern) if any(a[i] != i for i in range(q))]
    full = (1 << n) - 1
    sets = [0] * q
    label: List[int] = []  # labels of order[0..], q = deleted
    counter = [0]

    def lex_ok() -> bool:
        for a in auts:
            for x in label:
                y = a[x] if x < q else q
                if y != x:
                    if y < x:
                        return False
                    break
        return True

    def viable(rest: int) -> bool:
        empty = sum(1 for s in sets if s == 0)
        if empty > popcount(rest):
            return False
        regions = []
        for j in range(q):
            allowed = rest
            if induced:
                for k in range(q):
                    if k != j and not padj[j] >> k & 1 and sets[k]:
                        allowed &= ~host.neighborhood_mask(sets[k])
            s = sets[j]
            if s:
                region = reach_mask(host, s & -s, s | allowed)
                if s & ~region:
                    return False
            else:
                if not allowed:
                    return False
                region = allowed
            regions.append(region)
        for j in range(q):
            for k in iter_bits(padj[j] & ~((1 << (j + 1)) - 1)):
                if host.neighborhood_mask(sets[j]) & sets[k]:
                    continue
                rj, rk = regions[j], regions[k]
                if not (host.neighborhood_mask(rj) | rj) & rk:
                    return False
        return True

    def rec(t: int, rest: int) -> Optional[bool]:
        if t == n:
            return True
        counter[0] += 1
        if counter[0] > budget:
            return None
        v = order[t]
        nv = hm[v]
        rest &= ~(1 << v)
        for i in range(q + 1):
            if i < q:
                if induced and any(j != i and sets[j] & nv and not padj[i] >> j & 1 for j in range(q)):
                    continue
                sets[i] |= 1 << v
            label.append(i)
            if lex_ok() and viable(rest):
                r = rec(t + 1, rest)
                if r is None or r:
                    return r
            label.pop()
            if i < q:
                sets[i] &= ~(1 << v)
        return False

    res = rec(0, full)
    if res is None:
        return SearchResult(EXHAUSTED, nodes=counter[0])
    if not res:
        return SearchResult(ABSENT, nodes=counter[0])
    model = InducedMinorModel(pattern, tuple(frozenset(iter_bits(s)) for s in sets), induced)
    bad = validate_model(host, model)
    if bad:
        raise AssertionError(f"search produced an invalid model: {bad}")
    return SearchResult(FOUND, model, counter[0])


def find_clique_minor(host: Graph, t: int, budget: int = DEFAULT_BUDGET, **caps) -> SearchResult:
    from .graph import complete_graph

    return find_induced_minor(host, complete_graph(t), budget, induced=False, **caps)


# -- topological minors --------------------------------------------------------------------
@dataclass(frozen=True)
class SubdivisionWitness:
    branch: Tuple[int, ...]
    paths: Dict[Tuple[int, int], Tuple[int, ...]]

    def vertex_set(self) -> List[int]:
        return sorted(set(self.branch) | {v for p in self.paths.values() for v in p})

    def to_json(self) -> dict:
        return {"branch": list(self.branch),
                "paths": [[a, b, list(p)] for (a, b), p in sorted(self.paths.items())]}

    @classmethod
    def from_json(cls, obj: dict) -> "SubdivisionWitness":
        try:
            return cls(tuple(obj["branch"]), {(a, b): tuple(p) for a, b, p in obj["paths"]})
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed subdivision witness: {exc}") from None


def check_clique_subdivision(host: Graph, w: SubdivisionWitness) -> Optional[str]:
    """Paths given by skeleton index pairs (i, j), i < j, from branch[i] to branch[j]."""
    s = len(w.branch)
    if len(set(w.branch)) != s:
        return "branch vertices repeat"
    if set(w.paths) != {(i, j) for i in range(s) for j in range(i + 1, s)}:
        return "one path per branch pair required"
    inner_seen = set(w.branch)
    for (i, j), p in w.paths.items():
        if p[0] != w.branch[i] or p[-1] != w.branch[j]:
            return f"path {i}-{j} has wrong endpoints"
        for u, v in zip(p, p[1:]):
            if not host.has_edge(u, v):
                return f"path {i}-{j} uses non-edge ({u}, {v})"
        for v in p[1:-1]:
            if v in inner_seen:
                return f"vertex {v} used twice"
            inner_seen.add(v)
    return None


def find_clique_subdivision(host: Graph, s: int, budget: int = DEFAULT_BUDGET) -> SearchResult:
    """Subdivision of K_s as a subgraph, minimizing the number of path vertices.

    Iterative deepening on the total count of subdivision vertices; for each
    bound, branch-vertex sets are tried in lexicographic order and the
    pairwise paths are routed by depth-first backtracking.
    """
    if s < 1:
        raise GraphError("s must be at least 1")
    n = host.n
    cands = [v for v in host.vertices() if host.degree(v) >= s - 1]
    pairs = [(i, j) for i in range(s) for j in range(i + 1, s)]
    counter = [0]

    class Out(Exception):
        pass

    def route(branch, free: int, k: int, limit: int, paths) -> bool:
        if k == len(pairs):
            return True
        counter[0] += 1
        if counter[0] > budget:
            raise Out
        i, j = pairs[k]
        a, b = branch[i], branch[j]
        if host.has_edge(a, b):
            paths[(i, j)] = (a, b)
            if route(branch, free, k + 1, limit, paths):
                return True
            del paths[(i, j)]
            return False
        # remaining non-adjacent pairs each need at least one vertex
        need = sum(1 for (x, y) in pairs[k + 1:] if not host.has_edge(branch[x], branch[y]))
        bm = 1 << b
        stack = [(a, [a], free)]

        def dfs(u, path, fr) -> bool:
            counter[0] += 1
            if counter[0] > budget:
                raise Out
            used = len(path) - 1
            if host.mask(u) & bm and used >= 1:
                paths[(i, j)] = tuple(path) + (b,)
                if route(branch, fr, k + 1, limit - used, paths):
                    return True
                del paths[(i, j)]
            if used + 1 + need > limit:
                return False
            for w in iter_bits(host.mask(u) & fr):
                path.append(w)
                if dfs(w, path, fr & ~(1 << w)):
                    return True
                path.pop()
            return False

        return dfs(a, [a], free)

    try:
        for limit in range(0, n - s + 1):
            for combo in combinations(cands, s):
                free = ((1 << n) - 1) & ~host.set_mask(combo)
                paths: Dict[Tuple[int, int], Tuple[int, ...]] = {}
                if route(combo, free, 0, limit, paths):
                    w = SubdivisionWitness(tuple(combo), dict(paths))
                    bad = check_clique_subdivision(host, w)
                    if bad:
                        raise AssertionError(bad)
                    return SearchResult(FOUND, w, counter[0])
    except Out:
        return SearchResult(EXHAUSTED, nodes=counter[0])
    return SearchResult(ABSENT, nodes=counter[0])


def green_clique_ramsey(trim, ell: int, s: int) -> Optional[List[int]]:
    """Branch vertices of an all-green s-clique, or None.

    A skeleton pair is green when its direct path has more than ``ell``
    edges. The search is an exact backtracking clique search on the green
    graph, returning the lexicographically least clique (skeleton order).
    """
    skel = trim.skeleton
    t = skel.n
    if skel.m != t * (t - 1) // 2:
        raise GraphError("green-clique step needs a complete skeleton")
    green = [0] * t
    for (a, b), p in trim.paths.items():
        if len(p) - 1 > ell:
            green[a] |= 1 << b
            green[b] |= 1 << a

    def rec(chosen: List[int], cand: int) -> Optional[List[int]]:
        if len(chosen) == s:
            return chosen
        if popcount(cand) < s - len(chosen):
            return None
        for v in iter_bits(cand):
            r = rec(chosen + [v], cand & green[v] & ~((1 << (v + 1)) - 1))
            if r is not None:
                return r
        return None

    res = rec([], (1 << t) - 1)
    if res is None:
        return None
    return sorted(trim.branch[v] for v in res)
