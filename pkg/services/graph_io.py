from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import networkx as nx

from models.graph import Graph, Vertex
from services.graph_ops import relabel_consecutive

logger = logging.getLogger(__name__)


def to_networkx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from(G.edges())
    return H


def from_networkx(H: nx.Graph) -> Graph:
    return Graph.from_edges(H.nodes, H.edges)


def graph_to_graph6(G: Graph) -> str:
    """graph6 of G with vertices taken in vertex order (ids are not kept)."""
    R, _ = relabel_consecutive(G)
    return nx.to_graph6_bytes(to_networkx(R), header=False).decode("ascii").strip()


def graph_from_graph6(text: str) -> Graph:
    H = nx.from_graph6_bytes(text.strip().encode("ascii"))
    return from_networkx(H)


def graph_to_json(G: Graph) -> dict[str, Any]:
    ids = list(G.vertices)
    idx = G.index
    return {
        "n": G.n,
        "edges": [[idx[u], idx[v]] for u, v in G.edges()],
        "ids": ids,
    }


def graph_from_json(data: dict[str, Any]) -> Graph:
    n = int(data["n"])
    ids: list[Vertex] = list(data.get("ids") or range(n))
    if len(ids) != n or len(set(ids)) != n:
        raise ValueError(f"expected {n} distinct ids, got {ids!r}")
    edges = [(ids[a], ids[b]) for a, b in data.get("edges", [])]
    return Graph.from_edges(ids, edges)


def read_graph(path: Path | str) -> Graph:
    """Read a graph from a JSON file or a graph6 file (first line used)."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("{"):
        return graph_from_json(json.loads(text))
    if text.startswith(">>graph6<<"):
        text = text[len(">>graph6<<") :]
    first = text.splitlines()[0] if text else ""
    if not first:
        raise ValueError(f"no graph found in {path}")
    return graph_from_graph6(first)


def write_graph(G: Graph, path: Path | str, fmt: str = "json") -> None:
    path = Path(path)
    if fmt == "graph6":
        path.write_text(graph_to_graph6(G) + "\n", encoding="utf-8")
    elif fmt == "json":
        path.write_text(json.dumps(graph_to_json(G)) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown graph format: {fmt!r}")
    logger.info(f"Wrote graph with {G.n} vertices to {path}")
