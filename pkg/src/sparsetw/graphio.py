"""Reading and writing graphs: edge lists, graph6, JSON adjacency."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import networkx as nx

from .graph import Graph, GraphError

PathLike = Union[str, Path]


def parse_edgelist(text: str) -> Graph:
    """One ``u v`` pair per line, 0-based.

    Blank lines and ``#`` comments are skipped; a ``# n=<count>`` comment
    fixes the vertex count so isolated vertices survive a round trip.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    n = int(body[2:])
                except ValueError:
                    raise GraphError(f"line {lineno}: bad vertex count {body!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: negative vertex id")
        edges.append((u, v))
    top = max((max(e) for e in edges), default=-1) + 1
    if n is None:
        n = top
    elif top > n:
        raise GraphError(f"edge endpoint {top - 1} exceeds declared n={n}")
    return Graph(n, edges)


def format_edgelist(g: Graph) -> str:
    lines = [f"# n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def to_networkx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def from_networkx(h: nx.Graph) -> Graph:
    nodes = sorted(h.nodes())
    idx = {v: i for i, v in enumerate(nodes)}
    return Graph(len(nodes), [(idx[u], idx[v]) for u, v in h.edges()])


def parse_graph6(text: str) -> Graph:
    data = text.strip().encode("ascii")
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<"):]
    try:
        h = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError) as exc:
        raise GraphError(f"bad graph6 data: {exc}") from None
    return from_networkx(h)


def format_graph6(g: Graph) -> str:
    return nx.to_graph6_bytes(to_networkx(g), header=False).decode("ascii")


def graph_to_json(g: Graph) -> dict:
    out = {"n": g.n, "adjacency": [sorted(g.neighbors(v)) for v in g.vertices()]}
    if g.labels is not None:
        out["labels"] = [list(x) if isinstance(x, tuple) else x for x in g.labels]
    return out


def graph_from_json(obj: dict) -> Graph:
    try:
        n = int(obj["n"])
        adj = obj["adjacency"]
    except (KeyError, TypeError, ValueError):
        raise GraphError("JSON graph needs 'n' and 'adjacency'") from None
    if len(adj) != n:
        raise GraphError("adjacency list length differs from n")
    edges = set()
    for u, nbrs in enumerate(adj):
        for v in nbrs:
            if u not in adj[v]:
                raise GraphError(f"asymmetric adjacency between {u} and {v}")
            edges.add((min(u, v), max(u, v)))
    labels = obj.get("labels")
    if labels is not None:
        labels = [tuple(x) if isinstance(x, list) else x for x in labels]
    return Graph(n, edges, labels)


def detect_format(path: PathLike, text: str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".g6", ".graph6"):
        return "g6"
    if suffix == ".json":
        return "json"
    if suffix in (".txt", ".edges", ".el", ".edgelist"):
        return "edgelist"
    stripped = text.strip()
    if stripped.startswith("{"):
        return "json"
    if stripped and "\n" not in stripped and " " not in stripped:
        return "g6"
    return "edgelist"


def loads(text: str, fmt: str) -> Graph:
    if fmt == "g6":
        return parse_graph6(text)
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"bad JSON at line {exc.lineno}: {exc.msg}") from None
        return graph_from_json(obj)
    if fmt == "edgelist":
        return parse_edgelist(text)
    raise GraphError(f"unknown graph format {fmt!r}")


def dumps(g: Graph, fmt: str) -> str:
    if fmt == "g6":
        return format_graph6(g)
    if fmt == "json":
        return json.dumps(graph_to_json(g), sort_keys=True) + "\n"
    if fmt == "edgelist":
        return format_edgelist(g)
    raise GraphError(f"unknown graph format {fmt!r}")


def read_graph(path: PathLike, fmt: str = None) -> Graph:
    text = Path(path).read_text()
    return loads(text, fmt or detect_format(path, text))


def write_graph(g: Graph, path: PathLike, fmt: str = None) -> None:
    fmt = fmt or detect_format(path, "")
    Path(path).write_text(dumps(g, fmt))
