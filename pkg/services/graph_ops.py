from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable

from models.errors import EditError, UnknownVertexError
from models.graph import (
    BipartiteComplementation,
    EditLog,
    EditOp,
    Graph,
    ModuleNode,
    NodeKind,
    SubgraphComplementation,
    Vertex,
    VertexDeletion,
    vertex_key,
    vsorted,
)

logger = logging.getLogger(__name__)


def induced_subgraph(G: Graph, S: Iterable[Vertex]) -> Graph:
    keep = G.require(S)
    return Graph({v: G.neighbours(v) & keep for v in keep})


def apply_edit(G: Graph, op: EditOp) -> Graph:
    adj = {v: set(nb) for v, nb in G.adjacency().items()}
    if isinstance(op, VertexDeletion):
        if op.vertex not in G:
            raise UnknownVertexError(op.vertex)
        for w in adj.pop(op.vertex):
            adj[w].discard(op.vertex)
    elif isinstance(op, BipartiteComplementation):
        if op.s & op.t:
            raise EditError("bipartite complementation sides overlap")
        G.require(op.s | op.t)
        for a in op.s:
            for b in op.t:
                _toggle(adj, a, b)
    elif isinstance(op, SubgraphComplementation):
        members = vsorted(G.require(op.s))
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                _toggle(adj, a, b)
    else:
        raise EditError(f"unsupported edit op: {op!r}")
    return Graph(adj)


def _toggle(adj: dict[Vertex, set[Vertex]], a: Vertex, b: Vertex) -> None:
    if b in adj[a]:
        adj[a].discard(b)
        adj[b].discard(a)
    else:
        adj[a].add(b)
        adj[b].add(a)


def replay(G: Graph, log: EditLog | Iterable[EditOp]) -> Graph:
    ops = log.ops if isinstance(log, EditLog) else tuple(log)
    for op in ops:
        G = apply_edit(G, op)
    return G


def complement(G: Graph) -> Graph:
    all_v = frozenset(G.vertices)
    return Graph({v: all_v - G.neighbours(v) - {v} for v in G.vertices})


def disjoint_union(graphs: Iterable[Graph]) -> Graph:
    adj: dict[Vertex, frozenset[Vertex]] = {}
    for H in graphs:
        for v in H.vertices:
            if v in adj:
                raise ValueError(f"vertex {v!r} appears in more than one graph")
            adj[v] = H.neighbours(v)
    return Graph(adj)


def relabel_consecutive(G: Graph) -> tuple[Graph, dict[Vertex, int]]:
    """Rename vertices to 0..n-1 in vertex order; returns the new graph and the map."""
    mapping = {v: i for i, v in enumerate(G.vertices)}
    adj = {mapping[v]: {mapping[w] for w in G.neighbours(v)} for v in G.vertices}
    return Graph(adj), mapping


def connected_components(G: Graph) -> list[frozenset[Vertex]]:
    seen: set[Vertex] = set()
    out: list[frozenset[Vertex]] = []
    for root in G.vertices:
        if root in seen:
            continue
        comp = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in G.neighbours(v):
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


def bipartition(G: Graph) -> tuple[frozenset[Vertex], frozenset[Vertex]] | None:
    side: dict[Vertex, int] = {}
    for root in G.vertices:
        if root in side:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in vsorted(G.neighbours(v)):
                if w not in side:
                    side[w] = 1 - side[v]
                    queue.append(w)
                elif side[w] == side[v]:
                    return None
    a = frozenset(v for v, s in side.items() if s == 0)
    return a, frozenset(G.vertices) - a


def is_module(G: Graph, X: Iterable[Vertex]) -> bool:
    xs = G.require(X)
    for v in G.vertices:
        if v in xs:
            continue
        seen = G.neighbours(v) & xs
        if seen and seen != xs:
            return False
    return True


def minimal_module(
    G: Graph, u: Vertex, v: Vertex, within: frozenset[Vertex] | None = None
) -> frozenset[Vertex]:
    """Smallest module of G[within] containing u and v (closure under splitters)."""
    scope = frozenset(G.vertices) if within is None else within
    module = {u, v}
    frontier = [u, v]
    while frontier:
        frontier.clear()
        for x in scope:
            if x in module:
                continue
            seen = G.neighbours(x) & module
            if seen and len(seen) != len(module):
                frontier.append(x)
        module.update(frontier)
    return frozenset(module)


def _module_key(module: frozenset[Vertex]) -> tuple[int, list[tuple[bool, object]]]:
    return len(module), [vertex_key(v) for v in vsorted(module)]


def find_nontrivial_module(G: Graph) -> frozenset[Vertex] | None:
    if G.n <= 2:
        return None
    best: frozenset[Vertex] | None = None
    vs = G.vertices
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            module = minimal_module(G, u, v)
            if len(module) >= G.n:
                continue
            if best is None or _module_key(module) < _module_key(best):
                best = module
    return best


def is_prime(G: Graph) -> bool:
    return G.n >= 3 and find_nontrivial_module(G) is None


def false_twins(G: Graph) -> list[tuple[Vertex, Vertex]]:
    vs = G.vertices
    return [
        (u, v)
        for i, u in enumerate(vs)
        for v in vs[i + 1 :]
        if G.neighbours(u) == G.neighbours(v)
    ]


def modular_decomposition(G: Graph) -> ModuleNode:
    if G.n == 0:
        raise ValueError("modular decomposition of the empty graph")
    return _decompose(G, frozenset(G.vertices))


def _decompose(G: Graph, scope: frozenset[Vertex]) -> ModuleNode:
    if len(scope) == 1:
        return ModuleNode(kind="leaf", vertices=scope)
    H = induced_subgraph(G, scope)
    parts = connected_components(H)
    kind: NodeKind = "parallel"
    if len(parts) == 1:
        parts = connected_components(complement(H))
        kind = "series"
    if len(parts) == 1:
        kind = "prime"
        parts = _maximal_modules(H)
    children = tuple(
        sorted((_decompose(G, p) for p in parts), key=lambda c: vertex_key(c.representative))
    )
    reps = [c.representative for c in children]
    quotient = induced_subgraph(G, reps)
    logger.debug(f"module of size {len(scope)}: {kind} with {len(children)} children")
    return ModuleNode(kind=kind, vertices=scope, children=children, quotient=quotient)


def _maximal_modules(H: Graph) -> list[frozenset[Vertex]]:
    # H and its complement are connected, so maximal proper modules partition V(H)
    scope = frozenset(H.vertices)
    assigned: set[Vertex] = set()
    parts: list[frozenset[Vertex]] = []
    for v in H.vertices:
        if v in assigned:
            continue
        part = {v}
        for w in H.vertices:
            if w == v or w in part:
                continue
            module = minimal_module(H, v, w, scope)
            if len(module) < len(scope):
                part |= module
        assigned |= part
        parts.append(frozenset(part))
    return parts


def recompose(tree: ModuleNode) -> Graph:
    if tree.kind == "leaf":
        return Graph({tree.representative: ()})
    adj: dict[Vertex, set[Vertex]] = {}
    for child in tree.children:
        for v, nb in recompose(child).adjacency().items():
            adj[v] = set(nb)
    assert tree.quotient is not None
    for i, a in enumerate(tree.children):
        for b in tree.children[i + 1 :]:
            if tree.quotient.has_edge(a.representative, b.representative):
                for x in a.vertices:
                    for y in b.vertices:
                        adj[x].add(y)
                        adj[y].add(x)
    return Graph(adj)
