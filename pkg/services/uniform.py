from __future__ import annotations

import logging
from collections.abc import Sequence

from models.errors import ExpressionError
from models.expr import Create, CwExpr, Join, Relabel, Union
from models.graph import Graph, Vertex, vertex_key, vsorted
from models.uniform import UniformEmbedding, UniformSpec
from services.cwx import union_all

logger = logging.getLogger(__name__)


def realize(spec: UniformSpec) -> Graph:
    k = spec.k
    vertices = [c * k + (i - 1) for c in range(spec.m) for i in range(1, k + 1)]
    edges = []
    for x in vertices:
        cx, ix = divmod(x, k)
        for y in vertices:
            if y <= x:
                continue
            cy, iy = divmod(y, k)
            if cx == cy:
                adjacent = spec.same_copy_edge(ix + 1, iy + 1)
            else:
                adjacent = bool(spec.k_entry(ix + 1, iy + 1))
            if adjacent:
                edges.append((x, y))
    return Graph.from_edges(vertices, edges)


def default_copies(spec: UniformSpec) -> tuple[tuple[Vertex | None, ...], ...]:
    k = spec.k
    return tuple(tuple(c * k + i for i in range(k)) for c in range(spec.m))


def uniform_cw_expr(
    spec: UniformSpec, copies: Sequence[Sequence[Vertex | None]] | None = None
) -> CwExpr:
    """
    Expression with at most 2k labels. Labels 1..k hold the classes built so
    far; each copy is staged on labels k+1..2k, joined to the earlier copies
    by K and then moved down. `copies` places vertex ids in the slots of each
    copy (None for an absent slot); by default the ids of `realize(spec)`.
    """
    k = spec.k
    slots = default_copies(spec) if copies is None else copies
    acc: CwExpr | None = None
    for copy in slots:
        if len(copy) != k:
            raise ExpressionError(f"copy {list(copy)} does not have {k} slots")
        present = [(i, v) for i, v in enumerate(copy, start=1) if v is not None]
        if not present:
            continue
        staged = union_all([Create(k + i, v) for i, v in present])
        for a, (i, _) in enumerate(present):
            for j, _ in present[a + 1 :]:
                if spec.same_copy_edge(i, j):
                    staged = Join(k + i, k + j, staged)
        if acc is None:
            acc = staged
        else:
            acc = Union(acc, staged)
            for i, _ in present:
                for j in range(1, k + 1):
                    if spec.k_entry(i, j):
                        acc = Join(k + i, j, acc)
        for i, _ in present:
            acc = Relabel(k + i, i, acc)
    if acc is None:
        raise ExpressionError("uniform graph has no vertices")
    return acc


def special_3uniform_spec(m: int) -> UniformSpec:
    """F = K3 with K(1,2) = K(2,1) = 1 and zero elsewhere."""
    F = Graph.from_edges([1, 2, 3], [(1, 2), (1, 3), (2, 3)])
    K = ((0, 1, 0), (1, 0, 0), (0, 0, 0))
    return UniformSpec(k=3, K=K, F=F, m=m)


def recognize_3uniform_special(
    G: Graph, parts: tuple[frozenset[Vertex], frozenset[Vertex], frozenset[Vertex]]
) -> UniformEmbedding | None:
    A, B, U = (frozenset(p) for p in parts)
    if A & B or A & U or B & U or (A | B | U) != frozenset(G.vertices):
        return None
    if not all(G.is_independent(p) for p in (A, B, U)):
        return None
    anchor: dict[Vertex, Vertex] = {}
    for x in A | B:
        ups = G.neighbours(x) & U
        if len(ups) != 1:
            logger.debug(f"vertex {x!r} has {len(ups)} neighbours in U")
            return None
        anchor[x] = next(iter(ups))
    for a in A:
        for b in B:
            if G.has_edge(a, b) == (anchor[a] == anchor[b]):
                return None
    by_anchor: dict[Vertex, list[list[Vertex]]] = {u: [[], []] for u in U}
    for a in A:
        by_anchor[anchor[a]][0].append(a)
    for b in B:
        by_anchor[anchor[b]][1].append(b)
    copies = []
    for u in U:
        in_a, in_b = by_anchor[u]
        if len(in_a) > 1 or len(in_b) > 1:
            return None
        copies.append((in_a[0] if in_a else None, in_b[0] if in_b else None, u))
    copies.sort(key=lambda c: vertex_key(vsorted(v for v in c if v is not None)[0]))
    return UniformEmbedding(spec=special_3uniform_spec(len(copies)), copies=tuple(copies))
