from __future__ import annotations

import hashlib
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal

from models.errors import EditError, UnknownVertexError

Vertex = int | str


def vertex_key(v: Vertex) -> tuple[bool, Any]:
    # ints sort before strings, each in natural order
    return (isinstance(v, str), v)


def vsorted(vertices: Iterable[Vertex]) -> list[Vertex]:
    return sorted(vertices, key=vertex_key)


class Graph:
    """
    Immutable simple undirected graph over stable vertex ids.

    Vertex ids are ints or strings; every ordering in the package (witnesses,
    components, tie-breaks) follows `vertex_key`.
    """

    def __init__(self, adjacency: Mapping[Vertex, Iterable[Vertex]]):
        adj: dict[Vertex, frozenset[Vertex]] = {v: frozenset(nb) for v, nb in adjacency.items()}
        for v, nb in adj.items():
            if v in nb:
                raise ValueError(f"self-loop at vertex {v!r}")
            for w in nb:
                if w not in adj:
                    raise UnknownVertexError(w)
                if v not in adj[w]:
                    raise ValueError(f"asymmetric adjacency between {v!r} and {w!r}")
        self._adj = adj
        self._vertices = tuple(vsorted(adj))

    @classmethod
    def from_edges(
        cls, vertices: Iterable[Vertex], edges: Iterable[tuple[Vertex, Vertex]]
    ) -> Graph:
        adj: dict[Vertex, set[Vertex]] = {v: set() for v in vertices}
        for u, v in edges:
            if u not in adj:
                raise UnknownVertexError(u)
            if v not in adj:
                raise UnknownVertexError(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u!r}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    @classmethod
    def empty(cls) -> Graph:
        return cls({})

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return self._vertices

    @property
    def n(self) -> int:
        return len(self._vertices)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._vertices)

    def neighbours(self, v: Vertex) -> frozenset[Vertex]:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return v in self.neighbours(u)

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        idx = self.index
        return sorted(
            ((u, v) for u in self._vertices for v in self._adj[u] if idx[u] < idx[v]),
            key=lambda e: (idx[e[0]], idx[e[1]]),
        )

    def require(self, vertices: Iterable[Vertex]) -> frozenset[Vertex]:
        s = frozenset(vertices)
        for v in s:
            if v not in self._adj:
                raise UnknownVertexError(v)
        return s

    def adjacency(self) -> dict[Vertex, frozenset[Vertex]]:
        return dict(self._adj)

    @cached_property
    def index(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self._vertices)}

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhood bitmasks indexed by position in `vertices`."""
        idx = self.index
        out = []
        for v in self._vertices:
            m = 0
            for w in self._adj[v]:
                m |= 1 << idx[w]
            out.append(m)
        return tuple(out)

    def mask_of(self, vertices: Iterable[Vertex]) -> int:
        idx = self.index
        m = 0
        for v in vertices:
            try:
                m |= 1 << idx[v]
            except KeyError:
                raise UnknownVertexError(v) from None
        return m

    def is_independent(self, vertices: Iterable[Vertex]) -> bool:
        s = self.require(vertices)
        return all(not (self._adj[v] & s) for v in s)

    def is_complete_to(self, a: Iterable[Vertex], b: Iterable[Vertex]) -> bool:
        bs = self.require(b)
        return all(bs - {v} <= self._adj[v] for v in self.require(a))

    def is_anticomplete_to(self, a: Iterable[Vertex], b: Iterable[Vertex]) -> bool:
        bs = self.require(b)
        return all(not (self._adj[v] & bs) for v in self.require(a))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self._adj.items()))

    def digest(self) -> str:
        payload = repr((list(self._vertices), self.edges())).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


@dataclass(frozen=True)
class VertexDeletion:
    vertex: Vertex
    kind: Literal["vertex_deletion"] = field(default="vertex_deletion", init=False)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "vertex": self.vertex}


@dataclass(frozen=True)
class BipartiteComplementation:
    s: frozenset[Vertex]
    t: frozenset[Vertex]
    kind: Literal["bipartite_complementation"] = field(
        default="bipartite_complementation", init=False
    )

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(self.s))
        object.__setattr__(self, "t", frozenset(self.t))
        if self.s & self.t:
            overlap = vsorted(self.s & self.t)
            raise EditError(f"bipartite complementation sides overlap on {overlap}")

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "s": vsorted(self.s), "t": vsorted(self.t)}


@dataclass(frozen=True)
class SubgraphComplementation:
    s: frozenset[Vertex]
    kind: Literal["subgraph_complementation"] = field(
        default="subgraph_complementation", init=False
    )

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(self.s))

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "s": vsorted(self.s)}


NodeKind = Literal["leaf", "series", "parallel", "prime"]
EditOp = VertexDeletion | BipartiteComplementation | SubgraphComplementation


def edit_op_from_json(data: Mapping[str, Any]) -> EditOp:
    kind = data.get("kind")
    if kind == "vertex_deletion":
        return VertexDeletion(data["vertex"])
    if kind == "bipartite_complementation":
        return BipartiteComplementation(frozenset(data["s"]), frozenset(data["t"]))
    if kind == "subgraph_complementation":
        return SubgraphComplementation(frozenset(data["s"]))
    raise EditError(f"unknown edit op kind: {kind!r}")


@dataclass(frozen=True)
class EditCounts:
    deletions: int = 0
    bipartite_complementations: int = 0
    subgraph_complementations: int = 0


@dataclass(frozen=True)
class EditLog:
    input_graph_hash: str
    ops: tuple[EditOp, ...] = ()

    @property
    def counts(self) -> EditCounts:
        return EditCounts(
            deletions=sum(isinstance(op, VertexDeletion) for op in self.ops),
            bipartite_complementations=sum(
                isinstance(op, BipartiteComplementation) for op in self.ops
            ),
            subgraph_complementations=sum(
                isinstance(op, SubgraphComplementation) for op in self.ops
            ),
        )

    def to_json(self) -> dict[str, Any]:
        c = self.counts
        return {
            "input_graph_hash": self.input_graph_hash,
            "ops": [op.to_json() for op in self.ops],
            "counts": {
                "deletions": c.deletions,
                "bipartite_complementations": c.bipartite_complementations,
                "subgraph_complementations": c.subgraph_complementations,
            },
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> EditLog:
        return cls(
            input_graph_hash=data["input_graph_hash"],
            ops=tuple(edit_op_from_json(op) for op in data.get("ops", [])),
        )


@dataclass(frozen=True)
class ModuleNode:
    """
    Node of a modular decomposition tree.

    Leaves carry one vertex. Internal nodes carry their children ordered by
    smallest vertex and a quotient graph whose vertices are the children's
    representatives (smallest vertex of each child).
    """

    kind: NodeKind
    vertices: frozenset[Vertex]
    children: tuple[ModuleNode, ...] = ()
    quotient: Graph | None = None

    @property
    def representative(self) -> Vertex:
        return vsorted(self.vertices)[0]

    def iter_nodes(self):
        stack: list[ModuleNode] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "vertices": vsorted(self.vertices)}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out
