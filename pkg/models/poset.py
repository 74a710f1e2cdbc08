from __future__ import annotations

from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from typing import Any

import networkx as nx

from models.graph import Graph, Vertex


def _element(x: Any) -> Hashable:
    # JSON lists come back as tuples so product elements stay hashable
    if isinstance(x, list):
        return tuple(_element(y) for y in x)
    return x


@dataclass(frozen=True)
class Poset:
    elements: tuple[Hashable, ...]
    relation: frozenset[tuple[Hashable, Hashable]]

    def __post_init__(self):
        elems = set(self.elements)
        if len(elems) != len(self.elements):
            raise ValueError("poset elements must be distinct")
        for a, b in self.relation:
            if a not in elems or b not in elems:
                raise ValueError(f"relation mentions unknown element in ({a!r}, {b!r})")
        for a in self.elements:
            if (a, a) not in self.relation:
                raise ValueError(f"relation is not reflexive at {a!r}")
        succ: dict[Hashable, set[Hashable]] = {a: set() for a in self.elements}
        for a, b in self.relation:
            succ[a].add(b)
        for a, b in self.relation:
            if not succ[b] <= succ[a]:
                raise ValueError(f"relation is not transitive through ({a!r}, {b!r})")

    def __contains__(self, x: object) -> bool:
        return x in set(self.elements)

    def le(self, a: Hashable, b: Hashable) -> bool:
        return (a, b) in self.relation

    @classmethod
    def from_covers(
        cls, elements: Iterable[Hashable], covers: Iterable[tuple[Hashable, Hashable]]
    ) -> Poset:
        D = nx.DiGraph()
        elems = [_element(e) for e in elements]
        D.add_nodes_from(elems)
        D.add_edges_from((_element(a), _element(b)) for a, b in covers)
        if not nx.is_directed_acyclic_graph(D):
            raise ValueError("cover relation has a cycle")
        closure = nx.transitive_closure_dag(D)
        relation = {(a, a) for a in elems} | set(closure.edges())
        return cls(tuple(elems), frozenset(relation))

    @classmethod
    def antichain(cls, n: int) -> Poset:
        return cls.from_covers(range(n), [])

    @classmethod
    def chain(cls, n: int) -> Poset:
        return cls.from_covers(range(n), [(i, i + 1) for i in range(n - 1)])

    def covers(self) -> list[tuple[Hashable, Hashable]]:
        D = nx.DiGraph()
        D.add_nodes_from(self.elements)
        D.add_edges_from((a, b) for a, b in self.relation if a != b)
        return sorted(nx.transitive_reduction(D).edges(), key=repr)

    def to_json(self) -> dict[str, Any]:
        return {"elements": list(self.elements), "covers": [list(c) for c in self.covers()]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Poset:
        return cls.from_covers(data["elements"], [tuple(c) for c in data.get("covers", [])])


@dataclass(frozen=True)
class LabelledGraphW:
    graph: Graph
    labels: dict[Vertex, Hashable]

    def __post_init__(self):
        missing = [v for v in self.graph.vertices if v not in self.labels]
        if missing:
            raise ValueError(f"vertices without a label: {missing}")
