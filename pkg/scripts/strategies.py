from __future__ import annotations

import networkx as nx
from hypothesis import strategies as st

from models.graph import Graph
from services.graph_io import from_networkx


@st.composite
def graphs(draw, min_n: int = 0, max_n: int = 8) -> Graph:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(range(n), [e for e, keep in zip(pairs, chosen) if keep])


@st.composite
def bipartite_graphs(draw, min_n: int = 1, max_n: int = 8) -> Graph:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    side = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if side[u] != side[v]]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(range(n), [e for e, keep in zip(pairs, chosen) if keep])


def cycle(n: int) -> Graph:
    return from_networkx(nx.cycle_graph(n))


def path(n: int) -> Graph:
    return from_networkx(nx.path_graph(n))


def c5_with_pendant() -> Graph:
    """C5 on 0..4 with vertex 5 attached to 0."""
    return Graph.from_edges(range(6), [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)])


@st.composite
def sided_bipartite_graphs(
    draw, max_n: int = 8
) -> tuple[Graph, frozenset[int], frozenset[int]]:
    """Random bipartite graph with its two sides (either may be empty)."""
    n = draw(st.integers(min_value=0, max_value=max_n))
    side = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    A = frozenset(v for v in range(n) if side[v])
    B = frozenset(range(n)) - A
    pairs = [(a, b) for a in sorted(A) for b in sorted(B)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(range(n), [e for e, keep in zip(pairs, chosen) if keep]), A, B


def c5_and_c7() -> Graph:
    """Prime (K3,P1+P5)-free graph with both an induced C5 and an induced C7."""
    edges = [(0, 1), (0, 4), (0, 7), (1, 2), (1, 5), (2, 3), (2, 6)]
    edges += [(3, 4), (3, 5), (3, 8), (4, 6), (6, 7), (6, 8)]
    return Graph.from_edges(range(9), edges)


def c5_with_uniform_star() -> Graph:
    """
    C5 on 0..4 with A = {5, 6} seeing 4 and 1, B = {7, 8} seeing 0 and 2 and
    U = {9, 10}; copies (5, 7, 9) and (6, 8, 10), A complete to B across copies.
    """
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
    edges += [(5, 4), (5, 1), (6, 4), (6, 1), (7, 0), (7, 2), (8, 0), (8, 2)]
    edges += [(5, 9), (7, 9), (6, 10), (8, 10), (5, 8), (6, 7)]
    return Graph.from_edges(range(11), edges)
