"""Trim spanning supergraphs of (bi)clique subdivisions and density reduction.

``n`` in the balanced-partition bound is always the vertex count of the
*input* supergraph.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .graph import Edge, Graph, GraphError, complete_bipartite, induced_subgraph, is_two_connected
from .minors import InducedMinorModel, validate_model

Block = Tuple[int, ...]
Partition = Tuple[Block, ...]


class Refusal(GraphError):
    """A precondition of the assembly does not hold; ``inequality`` names it."""

    def __init__(self, inequality: str, detail: str):
        super().__init__(f"precondition {inequality} fails: {detail}")
        self.inequality = inequality
        self.detail = detail


class BudgetExhausted(RuntimeError):
    """Sampling ended without a certified partition."""


@dataclass(frozen=True)
class TrimSupergraph:
    """A subdivision of ``skeleton`` plus extra edges, inside ``host``.

    ``branch[a]`` is the host vertex of skeleton vertex a and ``paths[(a, b)]``
    (a < b) the direct path from ``branch[a]`` to ``branch[b]``. ``sides``
    names the two skeleton sides of a biclique. ``origin[v]`` is the id of
    host vertex v in the graph this one was cut from.
    """

    host: Graph
    skeleton: Graph
    branch: Tuple[int, ...]
    paths: Dict[Edge, Tuple[int, ...]]
    sides: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    origin: Optional[Tuple[int, ...]] = None

    @property
    def n(self) -> int:
        return self.host.n

    def path_edges(self) -> set:
        out = set()
        for p in self.paths.values():
            out.update((min(u, v), max(u, v)) for u, v in zip(p, p[1:]))
        return out

    def extra_edges(self) -> List[Edge]:
        return sorted(set(self.host.edges) - self.path_edges())

    @property
    def ell(self) -> int:
        """Shortest direct path length (the subdivision floor)."""
        return min((len(p) - 1 for p in self.paths.values()), default=0)

    def owners(self) -> Dict[int, Tuple[int, ...]]:
        """Skeleton vertices whose presence a host vertex requires."""
        out = {b: (a,) for a, b in enumerate(self.branch)}
        for e, p in self.paths.items():
            for v in p[1:-1]:
                out[v] = e
        return out

    def origin_of(self, v: int) -> int:
        return v if self.origin is None else self.origin[v]

    def to_json(self) -> dict:
        out = {
            "skeleton": {"n": self.skeleton.n, "edges": [list(e) for e in self.skeleton.sorted_edges()]},
            "branch": list(self.branch),
            "paths": [[a, b, list(p)] for (a, b), p in sorted(self.paths.items())],
        }
        if self.sides is not None:
            out["sides"] = [list(self.sides[0]), list(self.sides[1])]
        return out

    @classmethod
    def from_json(cls, host: Graph, obj: dict) -> "TrimSupergraph":
        try:
            skel = Graph(int(obj["skeleton"]["n"]), obj["skeleton"]["edges"])
            paths = {(int(a), int(b)): tuple(p) for a, b, p in obj["paths"]}
            sides = obj.get("sides")
            if sides is not None:
                sides = (tuple(sides[0]), tuple(sides[1]))
            return cls(host, skel, tuple(obj["branch"]), paths, sides)
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed trim supergraph JSON: {exc}") from None


def legal_extra_pairs(t: TrimSupergraph) -> List[Edge]:
    """Non-edges whose addition keeps ``t`` trim and within the extra-edge taxonomy."""
    own = t.owners()
    branch = set(t.branch)
    on_path: Dict[int, set] = {v: set() for v in range(t.n)}
    for e, p in t.paths.items():
        for v in p:
            on_path[v].add(e)
    out = []
    for u in range(t.n):
        for v in range(u + 1, t.n):
            if t.host.has_edge(u, v) or (u in branch and v in branch):
                continue
            if on_path[u] & on_path[v]:
                continue
            out.append((u, v))
    del own
    return out


def validate_trim(t: TrimSupergraph) -> Optional[str]:
    """None if every invariant holds, else the first violation."""
    g, sk = t.host, t.skeleton
    if len(t.branch) != sk.n:
        return "one branch vertex per skeleton vertex required"
    if len(set(t.branch)) != sk.n or any(not 0 <= b < g.n for b in t.branch):
        return "branch vertices must be distinct host vertices"
    if set(t.paths) != set(sk.edges):
        return "direct paths must match the skeleton edges"
    if t.sides is not None:
        a, b = t.sides
        if sorted(a + b) != list(range(sk.n)) or set(sk.edges) != {(min(x, y), max(x, y)) for x in a for y in b}:
            return "sides do not describe a complete bipartite skeleton"
    count = [0] * g.n
    for v in t.branch:
        count[v] += 1
    for (a, b), p in sorted(t.paths.items()):
        if len(p) < 2 or p[0] != t.branch[a] or p[-1] != t.branch[b]:
            return f"direct path {a}-{b} has wrong endpoints"
        for u, v in zip(p, p[1:]):
            if not g.has_edge(u, v):
                return f"direct path {a}-{b} uses non-edge ({u}, {v})"
        for v in p[1:-1]:
            count[v] += 1
        pos = {v: i for i, v in enumerate(p)}
        for v in p:
            for x in g.neighbors(v):
                if x in pos and abs(pos[x] - pos[v]) > 1:
                    return f"direct path {a}-{b} has chord ({min(v, x)}, {max(v, x)})"
    for v in range(g.n):
        if count[v] != 1:
            return f"host vertex {v} lies on {count[v]} branch/path positions, expected 1"
    branch = set(t.branch)
    for u, v in t.extra_edges():
        if u in branch and v in branch:
            return f"extra edge ({u}, {v}) joins two branch vertices"
    return None


def _require_valid(t: TrimSupergraph) -> None:
    bad = validate_trim(t)
    if bad:
        raise GraphError(f"invalid trim supergraph: {bad}")


def sub_trim(t: TrimSupergraph, keep: Sequence[int], sides=None) -> TrimSupergraph:
    """Trim supergraph induced by skeleton vertices ``keep`` and the paths among them.

    With ``sides`` (two disjoint subsets of ``keep``) only paths across the
    sides are kept and the result is over a biclique skeleton.
    """
    if sides is None:
        order = sorted(keep)
        allowed = {(a, b) for a, b in combinations(order, 2) if (a, b) in t.paths}
    else:
        a_side, b_side = sorted(sides[0]), sorted(sides[1])
        order = a_side + b_side
        allowed = {(min(a, b), max(a, b)) for a in a_side for b in b_side}
        if not allowed <= set(t.paths):
            raise GraphError("skeleton lacks some cross edges")
    new_id = {a: i for i, a in enumerate(order)}
    verts = {t.branch[a] for a in order}
    for e in allowed:
        verts.update(t.paths[e])
    host, vmap = induced_subgraph(t.host, verts)
    inv = sorted(verts)
    skel_edges = []
    paths = {}
    for a, b in allowed:
        x, y = new_id[a], new_id[b]
        p = tuple(vmap[v] for v in t.paths[(a, b)])
        if x > y:
            x, y, p = y, x, p[::-1]
        skel_edges.append((x, y))
        paths[(x, y)] = p
    skel = Graph(len(order), skel_edges)
    new_sides = None
    if sides is not None:
        k = len(sides[0])
        new_sides = (tuple(range(k)), tuple(range(k, len(order))))
    origin = tuple(t.origin_of(v) for v in inv)
    return TrimSupergraph(host, skel, tuple(vmap[t.branch[a]] for a in order), paths, new_sides, origin)


def is_complete(g: Graph) -> bool:
    return g.m == g.n * (g.n - 1) // 2


# -- clique to biclique --------------------------------------------------------------------------
@dataclass
class Split:
    trim: TrimSupergraph
    sides: Tuple[Tuple[int, ...], Tuple[int, ...]]
    retained: int
    total: int


def _balanced_bipartitions(s2: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Unordered balanced bipartitions, side A always containing vertex 0."""
    rest = list(range(1, s2))
    for comb in combinations(rest, s2 // 2 - 1):
        a = (0,) + comb
        b = tuple(v for v in range(s2) if v not in a)
        yield a, b


def _retained(t: TrimSupergraph, a, b) -> int:
    inner = sum(len(t.paths[(min(x, y), max(x, y))]) - 2 for x in a for y in b)
    return len(t.branch) + inner


def clique_to_biclique_split(t: TrimSupergraph, seed: int = 0, tries: int = 64,
                             exhaustive: bool = False) -> Split:
    """Keep the cross paths of a balanced bipartition retaining at least half the vertices.

    Sampling returns the first qualifying bipartition; ``exhaustive`` (or a
    failed sampling run with 2s <= 12) scans all of them and returns the best
    retention, ties broken by enumeration order.
    """
    _require_valid(t)
    s2 = t.skeleton.n
    if s2 % 2 or not is_complete(t.skeleton) or s2 < 2:
        raise GraphError("skeleton must be a clique on an even number of vertices")
    need = t.n  # compare 2 * retained >= n
    if not exhaustive:
        rng = random.Random(seed)
        for _ in range(tries):
            perm = list(range(s2))
            rng.shuffle(perm)
            a, b = sorted(perm[: s2 // 2]), sorted(perm[s2 // 2:])
            r = _retained(t, a, b)
            if 2 * r >= need:
                return Split(sub_trim(t, a + b, (a, b)), (tuple(a), tuple(b)), r, t.n)
        if s2 > 12:
            raise BudgetExhausted(f"no bipartition retaining half the vertices in {tries} tries")
    best = None
    for a, b in _balanced_bipartitions(s2):
        r = _retained(t, a, b)
        if best is None or r > best[0]:
            best = (r, a, b)
    r, a, b = best
    if 2 * r < need:
        raise AssertionError("averaging argument violated: no bipartition keeps half the vertices")
    return Split(sub_trim(t, list(a) + list(b), (a, b)), (a, b), r, t.n)


# -- balanced partitions ------------------------------------------------------------------------------
def balanced_partitions(items: Sequence[int], h: int) -> Iterator[Partition]:
    """Unordered partitions into h blocks of equal size, canonical lexicographic order."""
    items = sorted(items)
    if h <= 0 or len(items) % h:
        raise GraphError("h must divide the number of items")
    size = len(items) // h

    def rec(rest: List[int]) -> Iterator[Partition]:
        if not rest:
            yield ()
            return
        first, others = rest[0], rest[1:]
        for comb in combinations(others, size - 1):
            block = (first,) + comb
            left = [x for x in others if x not in comb]
            for tail in rec(left):
                yield (block,) + tail

    yield from rec(items)


def count_balanced_partitions(s: int, h: int) -> int:
    size = s // h
    return math.factorial(s) // (math.factorial(size) ** h * math.factorial(h))


def random_balanced_partition(items: Sequence[int], h: int, rng: random.Random) -> Partition:
    items = list(items)
    rng.shuffle(items)
    size = len(items) // h
    blocks = [tuple(sorted(items[i * size:(i + 1) * size])) for i in range(h)]
    return tuple(sorted(blocks))


@dataclass
class Dedensified:
    trim: TrimSupergraph
    partitions: Tuple[Partition, Partition]
    cell: Tuple[int, int]
    extras: int
    vertices: int
    bound: Fraction
    m: int
    n: int
    h: int
    sums: List[int] = field(default_factory=list)
    certified: bool = True


class _CellTable:
    """Precomputed data to score every G_{i,j} of a partition pair quickly."""

    def __init__(self, t: TrimSupergraph):
        a_side, b_side = t.sides
        self.a_side, self.b_side = a_side, b_side
        self.inner = {}
        for x in a_side:
            for y in b_side:
                self.inner[(x, y)] = len(t.paths[(min(x, y), max(x, y))]) - 2
        own = t.owners()
        aset = set(a_side)
        self.extra_owners = []
        for u, v in t.extra_edges():
            req = set(own[u]) | set(own[v])
            self.extra_owners.append((frozenset(req & aset), frozenset(req - aset)))

    def score(self, pa: Partition, pb: Partition):
        h = len(pa)
        where_a = {x: i for i, blk in enumerate(pa) for x in blk}
        where_b = {y: j for j, blk in enumerate(pb) for y in blk}
        extras = [[0] * h for _ in range(h)]
        for ra, rb in self.extra_owners:
            ia = {where_a[x] for x in ra}
            jb = {where_b[y] for y in rb}
            if len(ia) > 1 or len(jb) > 1:
                continue
            irange = list(ia) or range(h)
            jrange = list(jb) or range(h)
            for i in irange:
                for j in jrange:
                    extras[i][j] += 1
        verts = [[0] * h for _ in range(h)]
        for i, ba in enumerate(pa):
            for j, bb in enumerate(pb):
                verts[i][j] = len(ba) + len(bb) + sum(self.inner[(x, y)] for x in ba for y in bb)
        return extras, verts


def dedensify_balanced(t: TrimSupergraph, h: int, mode: str = "exhaustive", seed: int = 0,
                       draws: int = 200, budget: int = 50_000) -> Dedensified:
    """Pick G_{i,j} with at most (m / (h n)) n' extra edges.

    Exhaustive mode scans every pair of balanced partitions of the two
    sides; sampled mode scores ``draws`` seeded random pairs and records the
    sum of extras over all h^2 cells of each draw in ``sums``. Qualifying
    cells are ranked by (extras, vertices, partition rank, i, j).
    """
    _require_valid(t)
    if t.sides is None:
        raise GraphError("dedensify_balanced needs a biclique skeleton with sides")
    s = len(t.sides[0])
    if len(t.sides[1]) != s:
        raise GraphError("biclique sides must have equal size")
    if h < 1 or s % h:
        raise GraphError(f"h={h} does not divide s={s}")
    n = t.n
    m = len(t.extra_edges())
    table = _CellTable(t)

    if mode == "exhaustive":
        total = count_balanced_partitions(s, h) ** 2
        if total > budget:
            raise BudgetExhausted(f"{total} partition pairs exceed the exhaustive budget {budget}")
        pas = list(balanced_partitions(t.sides[0], h))
        pbs = list(balanced_partitions(t.sides[1], h))
        pairs = ((pa, pb) for pa in pas for pb in pbs)
    elif mode == "sampled":
        rng = random.Random(seed)
        pairs = ((random_balanced_partition(t.sides[0], h, rng), random_balanced_partition(t.sides[1], h, rng))
                 for _ in range(draws))
    else:
        raise GraphError(f"unknown mode {mode!r}")

    best = None
    sums = []
    for rank, (pa, pb) in enumerate(pairs):
        extras, verts = table.score(pa, pb)
        sums.append(sum(map(sum, extras)))
        for i in range(h):
            for j in range(h):
                if extras[i][j] * h * n <= m * verts[i][j]:
                    key = (extras[i][j], verts[i][j], rank, i, j)
                    if best is None or key < best[0]:
                        best = (key, pa, pb)
    if best is None:
        if mode == "sampled":
            raise BudgetExhausted(f"no qualifying G_ij among {draws} sampled partition pairs")
        raise AssertionError("no balanced partition pair meets the bound")
    (ex, nv, _, i, j), pa, pb = best
    out = sub_trim(t, list(pa[i]) + list(pb[j]), (pa[i], pb[j]))
    if len(out.extra_edges()) != ex or out.n != nv:
        raise AssertionError("cell bookkeeping disagrees with the induced subgraph")
    return Dedensified(out, (pa, pb), (i, j), ex, nv, Fraction(m, h * n) * nv, m, n, h, sums)


# -- assembly ---------------------------------------------------------------------------------------
def biclique_model(t: TrimSupergraph) -> InducedMinorModel:
    """Plain minor model of K_{r,r}: each A-side branch absorbs its paths' interiors."""
    a_side, b_side = t.sides
    r = len(a_side)
    sets = []
    for x in a_side:
        s = {t.branch[x]}
        for y in b_side:
            s.update(t.paths[(min(x, y), max(x, y))][1:-1])
        sets.append(s)
    for y in b_side:
        sets.append({t.branch[y]})
    return InducedMinorModel.of(complete_bipartite(r, r), sets, induced=False)


def _ratio(x: Fraction) -> List[int]:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def witness_inequalities(g: Graph, model: InducedMinorModel, ell: int, eps: Fraction, w: int,
                         extras: int) -> List[dict]:
    """The certificate's facts, recomputed from the output graph alone."""
    n, e = g.n, g.m
    r = model.pattern.n // 2
    subdiv_edges = e - extras
    rows = [
        ("two-connected", Fraction(int(is_two_connected(g))), Fraction(1)),
        ("biclique model valid", Fraction(int(validate_model(g, model, induced=False) is None)), Fraction(1)),
        ("w <= s/h", Fraction(w), Fraction(r)),
        ("|E| <= (1+eps)|V|", Fraction(e), (1 + eps) * n),
        ("subdivision edges <= (1+1/(ell-1))|V|", Fraction(subdiv_edges),
         (1 + Fraction(1, ell - 1)) * n if ell > 1 else Fraction(2 * e + 1)),
        ("extra edges <= (eps/2)|V|", Fraction(extras), eps / 2 * n),
    ]
    out = []
    for name, lhs, rhs in rows:
        ok = lhs == rhs if name in ("two-connected", "biclique model valid") else lhs <= rhs
        out.append({"name": name, "lhs": _ratio(lhs), "rhs": _ratio(rhs), "holds": ok})
    return out


@dataclass
class Assembly:
    vertices: List[int]
    trim: TrimSupergraph
    model: InducedMinorModel
    h: int
    r: int
    d: Fraction
    inequalities: List[dict]

    @property
    def ok(self) -> bool:
        return all(row["holds"] for row in self.inequalities)


def assemble_sparse_witness(t: TrimSupergraph, w: int, eps, seed: int = 0, d=None,
                            exhaustive_budget: int = 5000) -> Assembly:
    """Sparse 2-connected induced subgraph with a K_{r,r} minor, r >= w.

    h is set from the measured extra-edge ratio d = m/n of the input (or a
    supplied larger d) as ceil(4d/eps), raised to the least divisor of s.
    """
    eps = Fraction(eps)
    _require_valid(t)
    if t.skeleton.n % 2 or not is_complete(t.skeleton):
        raise Refusal("skeleton = K_2s", f"skeleton has {t.skeleton.n} vertices and {t.skeleton.m} edges")
    if eps <= 0:
        raise Refusal("eps > 0", str(eps))
    s = t.skeleton.n // 2
    need_ell = math.ceil(2 / eps) + 1
    if t.ell < need_ell:
        raise Refusal("ell >= ceil(2/eps)+1", f"ell = {t.ell} < {need_ell}")
    measured = Fraction(len(t.extra_edges()), t.n)
    if d is None:
        d = measured
    d = Fraction(d)
    if d < measured:
        raise Refusal("d >= measured extra ratio", f"{d} < {measured}")
    h = max(1, math.ceil(4 * d / eps))
    divisors = [x for x in range(h, s + 1) if s % x == 0]
    if not divisors or s // divisors[0] < w:
        raise Refusal("s >= h*w", f"s = {s}, h = {h}, w = {w}")
    h = divisors[0]

    split = clique_to_biclique_split(t, seed=seed)
    if count_balanced_partitions(s, h) ** 2 <= exhaustive_budget:
        ded = dedensify_balanced(split.trim, h, mode="exhaustive", budget=exhaustive_budget)
    else:
        try:
            ded = dedensify_balanced(split.trim, h, mode="sampled", seed=seed)
        except BudgetExhausted:
            ded = dedensify_balanced(split.trim, h, mode="exhaustive", budget=10 ** 7)
    out = ded.trim
    # certificate facts are recomputed from the induced subgraph of the input host
    verts = sorted(out.origin_of(v) for v in range(out.n))
    g, vmap = induced_subgraph(t.host, verts)
    model = biclique_model(out)
    model = InducedMinorModel(model.pattern, tuple(frozenset(vmap[out.origin_of(v)] for v in b)
                                                   for b in model.branch_sets), False)
    extras = g.m - sum(len(p) - 1 for p in out.paths.values())
    rows = witness_inequalities(g, model, t.ell, eps, w, extras)
    return Assembly(verts, out, model, h, s // h, d, rows)
