"""Command-line interface.

Exit codes: 0 success or found, 1 certified absent / invalid / refusal,
2 budget exhausted, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__, graphio
from . import certificates as certs
from .constructions import grid, random_graph, random_trim_supergraph, subdivide, wall, wall_quasi_subdivision
from .dedensify import (BudgetExhausted, Refusal, TrimSupergraph, assemble_sparse_witness, clique_to_biclique_split,
                        dedensify_balanced, is_complete)
from .graph import (Graph, GraphError, complete_bipartite, complete_graph, cycle_graph, degeneracy,
                    path_graph)
from .minors import ABSENT, EXHAUSTED, FOUND, find_clique_subdivision, find_induced_minor
from .structure import build_gx, build_torso, lift_hitting_set, project_bramble, random_decomposed_graph
from .walls import extract_wall_quasi_subdivision, planted_wall_host, thin_to_sparse_wall
from .width import (Bramble, CapExceeded, TreeDecomposition, bramble_order, decomposition_from_order,
                    exact_treewidth, min_fill_order, validate_tree_decomposition)

OK, NO, BUDGET, BAD_INPUT = 0, 1, 2, 3
_STATUS_CODE = {FOUND: OK, ABSENT: NO, EXHAUSTED: BUDGET}


class InputError(Exception):
    pass


# -- io helpers ----------------------------------------------------------------------------------------
def _read_graph(path: str) -> Graph:
    try:
        return graphio.read_graph(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _payload(obj: dict, key: str, path: str):
    """Accept either a bare object or a certificate wrapping it."""
    if isinstance(obj, dict) and "payload" in obj:
        obj = obj["payload"]
    if isinstance(obj, dict) and key in obj:
        return obj[key]
    return obj


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_cert(args, kind: str, payload: dict) -> None:
    cert = certs.make_certificate(kind, payload, seed=getattr(args, "seed", None), budget=getattr(args, "budget", None))
    _emit(certs.dumps(cert), args.out)


def _need_seed(args) -> int:
    if args.seed is None:
        raise InputError("this subcommand is randomized; pass --seed")
    return args.seed


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return value


# -- subcommands ---------------------------------------------------------------------------------------
def cmd_gen(args) -> int:
    fam, params = args.family, args.params
    meta = {"family": fam, "params": params}
    companion = None

    def ints(count):
        if len(params) != count:
            raise InputError(f"gen {fam} takes {count} integer parameter(s)")
        try:
            return [int(x) for x in params]
        except ValueError:
            raise InputError(f"gen {fam}: parameters must be integers") from None

    if fam == "grid":
        g = grid(*ints(1))
    elif fam == "wall":
        g = wall(*ints(1))
    elif fam == "clique":
        g = complete_graph(*ints(1))
    elif fam == "biclique":
        g = complete_bipartite(*ints(2))
    elif fam == "path":
        g = path_graph(*ints(1))
    elif fam == "cycle":
        g = cycle_graph(*ints(1))
    elif fam == "subdivided-clique":
        (s,) = ints(1)
        g, spec = subdivide(complete_graph(s), args.ell, mode="at-least", seed=_need_seed(args))
        companion = ("subdivision", {"subdivision": {"branch": list(spec.branch),
                                                     "paths": [[a, b, list(p[1:-1])] for (a, b), p in sorted(spec.paths.items())]}})
    elif fam == "quasi-wall":
        (k,) = ints(1)
        g, qs = wall_quasi_subdivision(k, args.triangles, args.ell, seed=_need_seed(args))
        companion = ("quasi", {"quasi": certs.quasi_to_json(qs)})
    elif fam == "planted-wall":
        (k,) = ints(1)
        g, model = planted_wall_host(k, _need_seed(args), ell=max(2, args.ell))
        companion = ("model", {"model": model.to_json()})
    elif fam in ("trim-clique", "trim-biclique"):
        s, extras = ints(2)
        t = random_trim_supergraph(fam[5:], s, args.ell, extras, _need_seed(args))
        g = t.host
        companion = ("trim", {"trim": t.to_json(), "extras": certs.rational(len(t.extra_edges()))})
    elif fam == "random":
        if len(params) != 2:
            raise InputError("gen random takes n and p")
        try:
            n, p = int(params[0]), float(params[1])
        except ValueError:
            raise InputError("gen random: n must be an integer and p a float") from None
        g = random_graph(n, p, _need_seed(args))
    elif fam == "decomposed":
        n, h = ints(2)
        g, td = random_decomposed_graph(n, h, _need_seed(args))
        companion = ("td", {"td": td.to_json(), "width": certs.rational(td.width)})
    else:
        raise InputError(f"unknown family {fam!r}")

    _emit(graphio.dumps(g, args.format), args.out)
    meta.update({"n": g.n, "m": g.m})
    if companion is not None:
        kind, payload = companion
        cert = certs.dumps(certs.make_certificate(kind, payload, seed=args.seed))
        if args.cert:
            Path(args.cert).write_text(cert)
            meta["certificate"] = args.cert
        else:
            meta["certificate_kind"] = kind
    sys.stderr.write(json.dumps(meta, sort_keys=True) + "\n")
    return OK


def _check_one(job):
    host_path, cert_path, kind = job
    host = _read_graph(host_path)
    cert = _read_json(cert_path)
    if kind != "any" and cert.get("kind") != kind:
        return cert_path, f"certificate kind is {cert.get('kind')!r}, expected {kind!r}"
    return cert_path, certs.check_certificate(host, cert)


def cmd_check(args) -> int:
    jobs = [(args.host, c, args.kind) for c in args.certs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_check_one, jobs))
    else:
        results = [_check_one(j) for j in jobs]
    code = OK
    for path, bad in results:
        print(f"{path}: {'ok' if bad is None else 'INVALID: ' + bad}")
        if bad is not None:
            code = NO
    return code


def cmd_tw(args) -> int:
    g = _read_graph(args.host)
    if not args.exact:
        low, _ = degeneracy(g)
        td = decomposition_from_order(g, min_fill_order(g))
        print(f"{low} <= tw <= {td.width}")
        return OK
    try:
        tw, td = exact_treewidth(g, cap=args.cap, budget=args.budget)
    except CapExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return BUDGET
    print(tw)
    if args.out:
        _emit_cert(args, "td", {"td": td.to_json(), "width": certs.rational(tw)})
    return OK


def cmd_validate_td(args) -> int:
    g = _read_graph(args.host)
    try:
        td = TreeDecomposition.from_json(_payload(_read_json(args.td), "td", args.td))
    except GraphError as exc:
        raise InputError(f"{args.td}: {exc}") from None
    rep = validate_tree_decomposition(g, td)
    if not rep.ok:
        print(f"invalid: {rep.violation}")
        return NO
    print(f"valid: width {rep.width}, adhesion {rep.adhesion_size}")
    return OK


def _load_bramble(path: str) -> Bramble:
    try:
        return Bramble.from_json(_payload(_read_json(path), "bramble", path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_bramble_order(args) -> int:
    g = _read_graph(args.host)
    b = _load_bramble(args.bramble)
    from .width import validate_bramble

    bad = validate_bramble(g, b)
    if bad:
        print(f"not a bramble: {bad}")
        return NO
    try:
        order, hs = bramble_order(g, b)
    except CapExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return BUDGET
    print(f"order {order}; minimum hitting set {hs}")
    if args.out:
        _emit_cert(args, "bramble", {"bramble": b.to_json(), "order": certs.rational(order), "hitting_set": hs})
    return OK


def cmd_find_im(args) -> int:
    host = _read_graph(args.host)
    pattern = _read_graph(args.pattern)
    try:
        res = find_induced_minor(host, pattern, budget=args.budget, induced=not args.plain)
    except GraphError as exc:
        raise InputError(str(exc)) from None
    print(res.status)
    if res.found:
        _emit_cert(args, "model", {"model": res.witness.to_json(), "nodes": res.nodes})
    return _STATUS_CODE[res.status]


def cmd_find_subdiv(args) -> int:
    host = _read_graph(args.host)
    res = find_clique_subdivision(host, args.s, budget=args.budget)
    print(res.status)
    if res.found:
        _emit_cert(args, "subdivision", {"subdivision": res.witness.to_json(), "nodes": res.nodes})
    return _STATUS_CODE[res.status]


def cmd_extract_wall(args) -> int:
    from .minors import InducedMinorModel

    host = _read_graph(args.host)
    try:
        model = InducedMinorModel.from_json(_payload(_read_json(args.model), "model", args.model))
    except GraphError as exc:
        raise InputError(f"{args.model}: {exc}") from None
    ex = extract_wall_quasi_subdivision(host, model)
    print(f"W_{ex.witness.wall_index} quasi-subdivision on {len(ex.witness.vertex_set())} vertices, "
          f"{ex.triangles} triangle(s)")
    _emit_cert(args, "quasi", {"quasi": certs.quasi_to_json(ex.witness)})
    return OK


def cmd_thin(args) -> int:
    host = _read_graph(args.host)
    try:
        qs = certs.quasi_from_json(_payload(_read_json(args.quasi), "quasi", args.quasi))
    except GraphError as exc:
        raise InputError(f"{args.quasi}: {exc}") from None
    th = thin_to_sparse_wall(host, qs, args.w, args.eps)
    print(f"{th.n} vertices, {th.edges} edges, density {th.density()}, two-connected {th.two_connected}")
    _emit_cert(args, "witness", {
        "vertices": th.vertices, "model": th.model.to_json(), "w": args.w, "eps": certs.rational(args.eps),
        "density": certs.rational(th.density()), "quasi": certs.quasi_to_json(th.witness),
    })
    return OK


def _load_trim(host: Graph, path: str) -> TrimSupergraph:
    try:
        return TrimSupergraph.from_json(host, _payload(_read_json(path), "trim", path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_dedensify(args) -> int:
    host = _read_graph(args.host)
    t = _load_trim(host, args.trim)
    seed = _need_seed(args) if args.mode == "sampled" else (args.seed or 0)
    try:
        if t.sides is None and is_complete(t.skeleton):
            t = clique_to_biclique_split(t, seed=seed).trim
        ded = dedensify_balanced(t, args.h, mode=args.mode, seed=seed,
                                 budget=args.budget if args.budget is not None else 50_000)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return BUDGET
    verts = [ded.trim.origin_of(v) for v in range(ded.trim.n)]
    # ded.trim ids -> host ids, with the vertex list in sorted order
    order = sorted(range(ded.trim.n), key=lambda v: verts[v])
    raw = ded.trim.to_json()
    back = lambda xs: [verts[v] for v in xs]
    raw["branch"] = back(raw["branch"])
    raw["paths"] = [[a, b, back(p)] for a, b, p in raw["paths"]]
    print(f"cell {ded.cell}: {ded.extras} extra edges on {ded.vertices} vertices (bound {ded.bound})")
    _emit_cert(args, "trim", {
        "vertices": [verts[v] for v in order], "trim": raw,
        "extras": certs.rational(ded.extras), "bound": certs.rational(ded.bound), "h": args.h,
    })
    return OK


def cmd_witness(args) -> int:
    host = _read_graph(args.host)
    t = _load_trim(host, args.trim)
    seed = _need_seed(args)
    try:
        asm = assemble_sparse_witness(t, args.w, args.eps, seed=seed)
    except Refusal as exc:
        print(f"refused: {exc}")
        _emit_cert(args, "refusal", {
            "inequality": exc.inequality, "detail": exc.detail,
            "request": {"op": "witness", "trim": t.to_json(), "w": args.w,
                        "eps": certs.rational(args.eps), "seed": seed},
        })
        return NO
    model = asm.model
    host_sets = [sorted(asm.vertices[v] for v in b) for b in model.branch_sets]
    mjson = dict(model.to_json(), branch_sets=host_sets)
    for row in asm.inequalities:
        print(f"{row['name']}: {'holds' if row['holds'] else 'FAILS'}")
    _emit_cert(args, "witness", {
        "vertices": asm.vertices, "model": mjson, "w": args.w, "eps": certs.rational(args.eps),
        "h": asm.h, "r": asm.r, "d": certs.rational(asm.d), "inequalities": asm.inequalities,
    })
    return OK if asm.ok else NO


def _load_td(path: str) -> TreeDecomposition:
    try:
        return TreeDecomposition.from_json(_payload(_read_json(path), "td", path))
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_gx(args) -> int:
    g = _read_graph(args.host)
    res = build_gx(g, _load_td(args.td), args.node)
    print(f"G_x: {res.graph.n} vertices ({len(res.bag)} bag, {len(res.independent)} independent), "
          f"{res.graph.m} edges; twin classes {res.twin_class_sizes}")
    if args.graph_out:
        Path(args.graph_out).write_text(graphio.dumps(res.graph, args.format))
    _emit_cert(args, "model", {"model": res.model.to_json(), "node": args.node})
    return OK


def cmd_torso(args) -> int:
    g = _read_graph(args.host)
    torso = build_torso(g, _load_td(args.td), args.node)
    _emit(graphio.dumps(torso, args.format), args.out)
    return OK


def cmd_project_bramble(args) -> int:
    g = _read_graph(args.host)
    td = _load_td(args.td)
    b = _load_bramble(args.bramble)
    pr = project_bramble(g, td, b, args.h, args.p)
    lift = lift_hitting_set(g, td, pr.node, pr.hitting_set, b, args.h)
    print(f"node {pr.node}: order {pr.order_in} -> {pr.order_out}; lifted hitting set of size {len(lift.hitting_set)}")
    _emit_cert(args, "projection", {
        "node": pr.node, "td": td.to_json(), "bramble": pr.projected.to_json(), "original": b.to_json(),
        "order": certs.rational(pr.order_out), "hitting_set": pr.hitting_set, "lift": lift.hitting_set,
    })
    return OK if pr.order_out >= args.p + 1 and lift.hits_all and lift.size_ok else NO


# -- parser --------------------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (required by randomized subcommands)")
    common.add_argument("--budget", type=int, default=None, help="search budget (nodes)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch work")
    common.add_argument("--format", choices=("g6", "edgelist", "json"), default="g6", help="graph output format")
    common.add_argument("--out", default=None, help="write the main output here instead of stdout")

    p = argparse.ArgumentParser(prog="sparsetw", description="Sparse induced subgraphs of large treewidth.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("gen", cmd_gen, "generate a graph family")
    sp.add_argument("family", help="grid | wall | clique | biclique | path | cycle | subdivided-clique | "
                                   "quasi-wall | planted-wall | trim-clique | trim-biclique | random | decomposed")
    sp.add_argument("params", nargs="*")
    sp.add_argument("--ell", type=int, default=3, help="minimum subdivision length")
    sp.add_argument("--triangles", type=float, default=0.0, help="share of triangle anchors (quasi-wall)")
    sp.add_argument("--cert", default=None, help="where to write the planted structure certificate")

    sp = add("check", cmd_check, "re-validate certificates against a host graph")
    sp.add_argument("kind", choices=("any",) + certs.KINDS)
    sp.add_argument("host")
    sp.add_argument("certs", nargs="+")

    sp = add("tw", cmd_tw, "treewidth (bounds, or exact with --exact)")
    sp.add_argument("host")
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--cap", type=int, default=24, help="largest vertex count for the exact solver")

    sp = add("validate-td", cmd_validate_td, "validate a tree decomposition")
    sp.add_argument("host")
    sp.add_argument("td")

    sp = add("bramble-order", cmd_bramble_order, "exact order of a bramble")
    sp.add_argument("host")
    sp.add_argument("bramble")

    sp = add("find-im", cmd_find_im, "search for an induced minor")
    sp.add_argument("host")
    sp.add_argument("pattern")
    sp.add_argument("--plain", action="store_true", help="plain minor instead of induced minor")

    sp = add("find-subdiv", cmd_find_subdiv, "search for a subdivision of K_s")
    sp.add_argument("host")
    sp.add_argument("s", type=int)

    sp = add("extract-wall", cmd_extract_wall, "induced quasi-subdivision of a wall from a wall model")
    sp.add_argument("host")
    sp.add_argument("model")

    sp = add("thin", cmd_thin, "sparse 2-connected subgraph with a wall subdivision")
    sp.add_argument("host")
    sp.add_argument("quasi")
    sp.add_argument("--w", type=int, required=True)
    sp.add_argument("--eps", type=_fraction, required=True)

    sp = add("dedensify", cmd_dedensify, "pick a sparse biclique cell from balanced partitions")
    sp.add_argument("host")
    sp.add_argument("trim")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")

    sp = add("witness", cmd_witness, "assemble a sparse witness from a clique trim supergraph")
    sp.add_argument("host")
    sp.add_argument("trim")
    sp.add_argument("--w", type=int, required=True)
    sp.add_argument("--eps", type=_fraction, required=True)

    sp = add("gx", cmd_gx, "contracted graph G_x of a decomposition node")
    sp.add_argument("host")
    sp.add_argument("td")
    sp.add_argument("node", type=int)
    sp.add_argument("--graph-out", default=None, help="also write G_x itself")

    sp = add("torso", cmd_torso, "torso of a decomposition node")
    sp.add_argument("host")
    sp.add_argument("td")
    sp.add_argument("node", type=int)

    sp = add("project-bramble", cmd_project_bramble, "project a bramble onto one bag")
    sp.add_argument("host")
    sp.add_argument("td")
    sp.add_argument("bramble")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else BAD_INPUT
    if args.budget is None and args.command in ("find-im", "find-subdiv"):
        from .minors import DEFAULT_BUDGET

        args.budget = DEFAULT_BUDGET
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return NO
    except (BudgetExhausted, CapExceeded) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return BUDGET
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def main() -> None:
    sys.exit(run())
