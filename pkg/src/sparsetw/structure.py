"""Torsos, the contracted graphs G_x, and bramble projection onto a single bag.

G_x keeps bag(x), contracts each component of G - bag(x) to one vertex and
then keeps one representative per class of false twins among the
contracted vertices. Its vertices are numbered: bag vertices first (in
increasing host id), then the representatives (by smallest host vertex).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import Graph, GraphError, induced_subgraph, iter_bits
from .minors import InducedMinorModel, validate_model
from .width import Bramble, TreeDecomposition, bramble_order, min_hitting_set, validate_bramble, validate_tree_decomposition


def _require(g: Graph, td: TreeDecomposition, x: int) -> None:
    rep = validate_tree_decomposition(g, td)
    if not rep.ok:
        raise GraphError(f"invalid tree decomposition: {rep.violation}")
    if not 0 <= x < td.tree.n:
        raise GraphError(f"node {x} is not a node of the decomposition")


def build_torso(g: Graph, td: TreeDecomposition, x: int) -> Graph:
    """G[bag(x)] with every adhesion of x completed to a clique (ids = bag order)."""
    _require(g, td, x)
    bag = sorted(td.bags[x])
    sub, idx = induced_subgraph(g, bag)
    edges = set(sub.edges)
    for adh in td.adhesions_of(x):
        ids = sorted(idx[v] for v in adh)
        edges.update((a, b) for i, a in enumerate(ids) for b in ids[i + 1:])
    return Graph(len(bag), edges, bag)


@dataclass
class GxResult:
    graph: Graph
    node: int
    bag: Tuple[int, ...]
    independent: List[int]
    classes: List[List[List[int]]]
    attachment: List[int]
    model: InducedMinorModel

    @property
    def bag_index(self) -> Dict[int, int]:
        return {v: i for i, v in enumerate(self.bag)}

    @property
    def twin_class_sizes(self) -> List[int]:
        return [len(c) for c in self.classes]

    def representative(self, i: int) -> List[int]:
        """Host component contracted into the i-th independent vertex."""
        return self.classes[i][0]

    def is_independent(self, v: int) -> bool:
        return v >= len(self.bag)


def build_gx(g: Graph, td: TreeDecomposition, x: int) -> GxResult:
    _require(g, td, x)
    bag = sorted(td.bags[x])
    bidx = {v: i for i, v in enumerate(bag)}
    outside = [v for v in g.vertices() if v not in bidx]
    comps = g.components(outside) if outside else []
    bag_mask = g.set_mask(bag)
    by_attach: Dict[Tuple[int, ...], List[List[int]]] = {}
    for comp in comps:
        att = tuple(sorted(iter_bits(g.neighborhood_mask(g.set_mask(comp)) & bag_mask)))
        by_attach.setdefault(att, []).append(comp)
    classes = sorted(by_attach.items(), key=lambda kv: min(kv[1][0]))
    sub, _ = induced_subgraph(g, bag)
    edges = set(sub.edges)
    independent = []
    class_list = []
    attachment = []
    for t, (att, members) in enumerate(classes):
        members.sort(key=min)
        vid = len(bag) + t
        independent.append(vid)
        class_list.append(members)
        edges.update((bidx[a], vid) for a in att)
        attachment.append(_attachment_node(td, x, members[0]))
    gx = Graph(len(bag) + len(classes), edges)
    sets = [[v] for v in bag] + [c[0] for c in class_list]
    model = InducedMinorModel.of(gx, sets)
    return GxResult(gx, x, tuple(bag), independent, class_list, attachment, model)


def _attachment_node(td: TreeDecomposition, x: int, comp: Sequence[int]) -> int:
    """Tree neighbour of x on the side holding the component."""
    tree = td.tree
    hosting = next(y for y, b in enumerate(td.bags) if b & set(comp))
    # walk from the hosting node towards x; the last step enters x
    parent = {x: None}
    queue = [x]
    for u in queue:
        for w in tree.neighbors(u):
            if w not in parent:
                parent[w] = u
                queue.append(w)
    node = hosting
    while parent[node] != x:
        node = parent[node]
    return node


def check_gx_invariants(g: Graph, gx: GxResult) -> Optional[str]:
    bad = validate_model(g, gx.model)
    if bad:
        return f"G_x is not certified as an induced minor: {bad}"
    nb = len(gx.bag)
    seen = set()
    for v in gx.independent:
        nbrs = gx.graph.neighbors(v)
        if any(u >= nb for u in nbrs):
            return f"independent vertex {v} has a neighbour outside the bag"
        key = frozenset(nbrs)
        if key in seen:
            return f"independent vertex {v} duplicates a twin class"
        seen.add(key)
    return None


@dataclass
class DegreeReport:
    h: int
    bound: int
    adhesion_ok: bool
    heavy: List[int]
    heavy_ok: bool
    max_light_degree: int
    max_independent_degree: int
    ok: bool

    @property
    def slack(self) -> int:
        return self.bound - self.max_light_degree


def check_gx_degree_transfer(g: Graph, td: TreeDecomposition, x: int, h: int) -> DegreeReport:
    """Degrees in G_x of every vertex that is not heavy (degree > h) in the torso.

    Preconditions are reported, not enforced.
    """
    torso = build_torso(g, td, x)
    gx = build_gx(g, td, x)
    bound = h + 2 ** (h + 1)
    heavy = [i for i in torso.vertices() if torso.degree(i) > h]
    hs = set(heavy)
    light = [v for v in gx.graph.vertices() if v not in hs]
    max_light = max((gx.graph.degree(v) for v in light), default=0)
    max_ind = max((gx.graph.degree(v) for v in gx.independent), default=0)
    return DegreeReport(
        h, bound, td.adhesion_size() <= h, [gx.bag[i] for i in heavy], len(heavy) <= h,
        max_light, max_ind, max_light <= bound,
    )


def project_minor_model_to_torso(gx: GxResult, model: InducedMinorModel) -> InducedMinorModel:
    """K_h model in the torso from a K_{h+1} model in G_x.

    The branch set that is a single independent vertex (at most one can be)
    is dropped, or the last set if there is none; independent vertices are
    removed from the others.
    """
    bad = validate_model(gx.graph, model, induced=False)
    if bad:
        raise GraphError(f"invalid model: {bad}")
    t = model.pattern.n
    if model.pattern.m != t * (t - 1) // 2 or t < 2:
        raise GraphError("model must be of a clique with at least 2 vertices")
    nb = len(gx.bag)
    drop = [i for i, b in enumerate(model.branch_sets) if all(v >= nb for v in b)]
    if len(drop) > 1:
        raise AssertionError("two branch sets inside the independent set")
    gone = drop[0] if drop else t - 1
    sets = [frozenset(v for v in b if v < nb) for i, b in enumerate(model.branch_sets) if i != gone]
    from .graph import complete_graph

    return InducedMinorModel(complete_graph(t - 1), tuple(sets), False)


@dataclass
class BrambleProjection:
    node: int
    gx: GxResult
    projected: Bramble
    order_in: int
    order_out: int
    hitting_set: List[int]


def _helly_node(td: TreeDecomposition, b: Bramble) -> int:
    common = set(range(td.tree.n))
    for s in b.sets:
        common &= {y for y, bag in enumerate(td.bags) if bag & s}
    if not common:
        raise AssertionError("bramble subtrees have no common node")
    return min(common)


def _project_sets(g: Graph, gx: GxResult, b: Bramble) -> Bramble:
    bidx = gx.bag_index
    owner = {}
    for t, members in enumerate(gx.classes):
        for comp in members:
            for v in comp:
                owner[v] = gx.independent[t]
    out = []
    for s in b.sets:
        out.append({bidx[v] for v in s if v in bidx} | {owner[v] for v in s if v in owner})
    return Bramble.of(out)


def project_bramble(g: Graph, td: TreeDecomposition, bramble: Bramble, h: int, p: int) -> BrambleProjection:
    """Bramble of order >= p+1 in G_x from one of order >= hp+1 in g."""
    rep = validate_tree_decomposition(g, td)
    if not rep.ok:
        raise GraphError(f"invalid tree decomposition: {rep.violation}")
    if rep.adhesion_size > h:
        raise GraphError(f"adhesion size {rep.adhesion_size} exceeds h={h}")
    order_in, _ = bramble_order(g, bramble)
    if order_in < h * p + 1:
        raise GraphError(f"bramble order {order_in} is below hp+1 = {h * p + 1}")
    x = _helly_node(td, bramble)
    gx = build_gx(g, td, x)
    proj = _project_sets(g, gx, bramble)
    bad = validate_bramble(gx.graph, proj)
    if bad:
        raise AssertionError(f"projected family is not a bramble: {bad}")
    order_out, hs = bramble_order(gx.graph, proj)
    return BrambleProjection(x, gx, proj, order_in, order_out, hs)


@dataclass
class Lift:
    hitting_set: List[int]
    size_ok: bool
    hits_all: bool


def lift_hitting_set(g: Graph, td: TreeDecomposition, x: int, z: Sequence[int], bramble: Bramble,
                     h: Optional[int] = None) -> Lift:
    """Hitting set of the original bramble from one of its projection at node x.

    Bag elements are kept; an independent vertex is replaced by its
    neighbours in G_x (at most h of them).
    """
    gx = build_gx(g, td, x)
    proj = _project_sets(g, gx, bramble)
    zs = set(z)
    for i, s in enumerate(proj.sets):
        if not s & zs:
            raise GraphError(f"z misses projected set {i}")
    if h is None:
        h = td.adhesion_size()
    nb = len(gx.bag)
    out = set()
    for v in zs:
        if v < nb:
            out.add(gx.bag[v])
        else:
            out.update(gx.bag[u] for u in gx.graph.neighbors(v))
    hits = all(s & out for s in bramble.sets)
    return Lift(sorted(out), len(out) <= h * len(zs), hits)


# -- instance generator (test scaffolding) -----------------------------------------------------------
def random_decomposed_graph(n: int, h: int, seed: int, bag_size: int = 5,
                            edge_prob: float = 0.5) -> Tuple[Graph, TreeDecomposition]:
    """Random graph built together with a tree decomposition of adhesion <= h.

    Each new node hangs off a random earlier node, inherits at most h of its
    bag and receives fresh vertices; edges are drawn inside bags only.
    """
    if bag_size <= h:
        raise GraphError("bag_size must exceed h")
    rng = random.Random(seed)
    bags: List[List[int]] = [list(range(min(bag_size, n)))]
    tree_edges = []
    nxt = len(bags[0])
    while nxt < n:
        parent = rng.randrange(len(bags))
        shared = rng.sample(bags[parent], rng.randint(0, min(h, len(bags[parent]))))
        fresh = list(range(nxt, min(n, nxt + rng.randint(1, bag_size - len(shared)))))
        nxt += len(fresh)
        tree_edges.append((parent, len(bags)))
        bags.append(shared + fresh)
    edges = set()
    for b in bags:
        for i, u in enumerate(b):
            for v in b[i + 1:]:
                if rng.random() < edge_prob:
                    edges.add((min(u, v), max(u, v)))
    g = Graph(n, edges)
    return g, TreeDecomposition.from_bags(bags, tree_edges)


def attach_ears(core: Graph, ears: int, seed: int, h: int = 2, ear_size: int = 3) -> Tuple[Graph, TreeDecomposition, List[List[int]]]:
    """Core graph plus small connected ears glued on at most h core vertices.

    Returns the graph, a decomposition with one core bag (node 0) and one bag
    per ear, and the ear vertex lists.
    """
    rng = random.Random(seed)
    edges = set(core.edges)
    bags = [list(core.vertices())]
    tree_edges = []
    nxt = core.n
    ear_list = []
    for _ in range(ears):
        size = rng.randint(1, ear_size)
        ear = list(range(nxt, nxt + size))
        nxt += size
        for t in range(1, size):
            edges.add((ear[rng.randrange(t)], ear[t]))
        glue = rng.sample(range(core.n), rng.randint(1, h))
        for a in glue:
            edges.add((a, rng.choice(ear)))
        tree_edges.append((0, len(bags)))
        bags.append(glue + ear)
        ear_list.append(ear)
    return Graph(nxt, edges), TreeDecomposition.from_bags(bags, tree_edges), ear_list


def bramble_fixture(k: int, ears: int, seed: int, h: int = 2) -> Tuple[Graph, TreeDecomposition, Bramble]:
    """Grid with ears glued on, and its cross bramble grown into some of the ears."""
    from .constructions import grid
    from .width import grid_bramble

    rng = random.Random(seed)
    g, td, ear_list = attach_ears(grid(k), ears, seed, h=h)
    sets = [set(s) for s in grid_bramble(k).sets]
    for ear in ear_list:
        touching = [s for s in sets if g.neighborhood_mask(g.set_mask(s)) & g.set_mask(ear)]
        if touching and rng.random() < 0.7:
            rng.choice(touching).update(ear)
    return g, td, Bramble.of(sets)
