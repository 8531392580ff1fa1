"""JSON certificates: construction, round-tripping and re-validation against a host graph.

A certificate is ``{"kind", "payload", "environment"}``. Numeric claims are
stored as ``[numerator, denominator]`` pairs. Payloads that carry a
``vertices`` list refer to the subgraph of the host induced on it; all
vertex ids in a payload are host ids.
"""
from __future__ import annotations

import json
from datetime import datetime, timezone
from fractions import Fraction
from typing import Dict, Optional

from . import __version__
from .constructions import QuasiSubdivision, check_quasi_subdivision, wall
from .dedensify import TrimSupergraph, validate_trim
from .graph import Graph, GraphError, induced_subgraph, is_two_connected
from .minors import InducedMinorModel, SubdivisionWitness, check_clique_subdivision, validate_model
from .structure import build_gx
from .width import Bramble, TreeDecomposition, bramble_order, tw_lower_bound_from_witness, validate_bramble, validate_tree_decomposition

KINDS = ("model", "trim", "bramble", "witness", "refusal", "td", "quasi", "subdivision", "projection")


def rational(x) -> list:
    x = Fraction(x)
    return [x.numerator, x.denominator]


def from_rational(pair) -> Fraction:
    try:
        num, den = pair
        return Fraction(int(num), int(den))
    except (TypeError, ValueError, ZeroDivisionError):
        raise GraphError(f"bad rational {pair!r}") from None


def make_certificate(kind: str, payload: dict, seed: Optional[int] = None, budget: Optional[int] = None) -> dict:
    if kind not in KINDS:
        raise GraphError(f"unknown certificate kind {kind!r}")
    env = {
        "seed": seed,
        "budget": budget,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return {"kind": kind, "payload": payload, "environment": env}


def dumps(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, indent=2) + "\n"


def loads(text: str) -> dict:
    try:
        cert = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"certificate JSON error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(cert, dict) or "kind" not in cert or "payload" not in cert:
        raise GraphError("certificate needs 'kind' and 'payload' fields")
    return cert


def strip_timestamp(cert: dict) -> dict:
    out = dict(cert)
    env = dict(out.get("environment", {}))
    env.pop("timestamp", None)
    out["environment"] = env
    return out


# -- payload codecs ----------------------------------------------------------------------------------
def quasi_to_json(qs: QuasiSubdivision) -> dict:
    out = {
        "anchors": [list(a) for a in qs.anchors],
        "ports": [[p, q, v] for (p, q), v in sorted(qs.ports.items())],
        "paths": [[p, q, list(inner)] for (p, q), inner in sorted(qs.paths.items())],
    }
    if qs.wall_index is not None:
        out["wall"] = qs.wall_index
    else:
        out["pattern"] = {"n": qs.pattern.n, "edges": [list(e) for e in qs.pattern.sorted_edges()]}
    return out


def quasi_from_json(obj: dict) -> QuasiSubdivision:
    try:
        if "wall" in obj:
            k = int(obj["wall"])
            pat = wall(k)
        else:
            k = None
            pat = Graph(int(obj["pattern"]["n"]), obj["pattern"]["edges"])
        return QuasiSubdivision(
            pat,
            tuple(tuple(a) for a in obj["anchors"]),
            {(int(p), int(q)): int(v) for p, q, v in obj["ports"]},
            {(int(p), int(q)): tuple(inner) for p, q, inner in obj["paths"]},
            wall_index=k,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed quasi-subdivision JSON: {exc}") from None


def _restrict(host: Graph, payload: dict):
    """Induced subgraph named by ``payload['vertices']`` (or the host) and the id map."""
    verts = payload.get("vertices")
    if verts is None:
        return host, {v: v for v in host.vertices()}
    if len(set(verts)) != len(verts) or any(not isinstance(v, int) or not 0 <= v < host.n for v in verts):
        raise GraphError("payload vertex list has duplicates or out-of-range ids")
    return induced_subgraph(host, verts)


def _relabel_model(model: InducedMinorModel, vmap: Dict[int, int]) -> InducedMinorModel:
    try:
        sets = tuple(frozenset(vmap[v] for v in b) for b in model.branch_sets)
    except KeyError as exc:
        raise GraphError(f"model uses vertex {exc.args[0]} outside the payload vertex list") from None
    return InducedMinorModel(model.pattern, sets, model.induced)


# -- checks --------------------------------------------------------------------------------------------
def witness_facts(g: Graph, model: InducedMinorModel, w: int, eps: Fraction) -> Dict[str, bool]:
    """The three headline facts of a sparse witness, recomputed on ``g``."""
    bad = validate_model(g, model)
    tw = tw_lower_bound_from_witness(g, model) if bad is None else -1
    return {
        "two-connected": is_two_connected(g),
        "tw >= w": tw >= w,
        "|E| <= (1+eps)|V|": g.m * eps.denominator <= (eps.denominator + eps.numerator) * g.n,
    }


def check_certificate(host: Graph, cert: dict) -> Optional[str]:
    """None when the certificate re-validates against ``host``, else the reason."""
    kind = cert.get("kind")
    p = cert.get("payload")
    if not isinstance(p, dict):
        return "payload must be an object"
    try:
        return _CHECKS[kind](host, p)
    except KeyError:
        if kind not in _CHECKS:
            return f"unknown certificate kind {kind!r}"
        raise
    except (GraphError, TypeError, ValueError) as exc:
        return f"malformed {kind} payload: {exc}"


def _check_model(host, p):
    g, vmap = _restrict(host, p)
    model = _relabel_model(InducedMinorModel.from_json(p["model"]), vmap)
    return validate_model(g, model)


def _check_td(host, p):
    td = TreeDecomposition.from_json(p["td"])
    rep = validate_tree_decomposition(host, td)
    if not rep.ok:
        return rep.violation
    if "width" in p and from_rational(p["width"]) != rep.width:
        return f"claimed width {from_rational(p['width'])} but decomposition has width {rep.width}"
    return None


def _check_bramble(host, p):
    b = Bramble.from_json(p["bramble"])
    bad = validate_bramble(host, b)
    if bad:
        return bad
    if "order" in p:
        order, _ = bramble_order(host, b)
        if from_rational(p["order"]) != order:
            return f"claimed order {from_rational(p['order'])} but exact order is {order}"
    return None


def _check_trim(host, p):
    g, vmap = _restrict(host, p)
    raw = p["trim"]
    if "vertices" in p:
        remap = lambda xs: [vmap[v] for v in xs]
        raw = dict(raw, branch=remap(raw["branch"]), paths=[[a, b, remap(path)] for a, b, path in raw["paths"]])
    t = TrimSupergraph.from_json(g, raw)
    bad = validate_trim(t)
    if bad:
        return bad
    if "extras" in p and from_rational(p["extras"]) != len(t.extra_edges()):
        return "claimed extra-edge count differs from the recomputed one"
    if "bound" in p and len(t.extra_edges()) > from_rational(p["bound"]):
        return "extra edges exceed the claimed bound"
    return None


def _check_quasi(host, p):
    return check_quasi_subdivision(host, quasi_from_json(p["quasi"]))


def _check_subdivision(host, p):
    return check_clique_subdivision(host, SubdivisionWitness.from_json(p["subdivision"]))


def _check_witness(host, p):
    g, vmap = _restrict(host, p)
    model = _relabel_model(InducedMinorModel.from_json(p["model"]), vmap)
    facts = witness_facts(g, model, int(p["w"]), from_rational(p["eps"]))
    for name, ok in facts.items():
        if not ok:
            return f"inequality fails on the output graph: {name}"
    return None


def _check_refusal(host, p):
    if not p.get("inequality"):
        return "refusal must name the violated inequality"
    req = p.get("request")
    if req and req.get("op") == "witness":
        from .dedensify import Refusal, assemble_sparse_witness

        t = TrimSupergraph.from_json(host, req["trim"])
        try:
            assemble_sparse_witness(t, int(req["w"]), from_rational(req["eps"]), seed=int(req.get("seed", 0)))
        except Refusal as exc:
            if exc.inequality != p["inequality"]:
                return f"re-run refuses on {exc.inequality!r}, not {p['inequality']!r}"
            return None
        return "re-running the request succeeds, so the refusal does not reproduce"
    return None


def _check_projection(host, p):
    td = TreeDecomposition.from_json(p["td"])
    gx = build_gx(host, td, int(p["node"]))
    b = Bramble.from_json(p["bramble"])
    bad = validate_bramble(gx.graph, b)
    if bad:
        return f"projected family: {bad}"
    order, _ = bramble_order(gx.graph, b)
    if order != from_rational(p["order"]):
        return f"claimed order {from_rational(p['order'])} but exact order is {order}"
    if "lift" in p:
        lift = set(p["lift"])
        original = Bramble.from_json(p["original"])
        if any(not (s & lift) for s in original.sets):
            return "lifted set misses an original bramble set"
    return None


_CHECKS = {
    "model": _check_model,
    "td": _check_td,
    "bramble": _check_bramble,
    "trim": _check_trim,
    "quasi": _check_quasi,
    "subdivision": _check_subdivision,
    "witness": _check_witness,
    "refusal": _check_refusal,
    "projection": _check_projection,
}
