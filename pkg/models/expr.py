from __future__ import annotations

from dataclasses import dataclass

from models.errors import ExpressionError
from models.graph import Graph, Vertex


@dataclass(frozen=True, eq=False)
class Create:
    label: int
    vertex: Vertex

    def __post_init__(self):
        if self.label < 1:
            raise ExpressionError(f"labels are positive integers, got {self.label}")


@dataclass(frozen=True, eq=False)
class Union:
    left: CwExpr
    right: CwExpr


@dataclass(frozen=True, eq=False)
class Join:
    i: int
    j: int
    child: CwExpr

    def __post_init__(self):
        if self.i == self.j:
            raise ExpressionError(f"join needs two distinct labels, got {self.i} twice")
        if self.i < 1 or self.j < 1:
            raise ExpressionError(f"labels are positive integers, got {self.i}, {self.j}")


@dataclass(frozen=True, eq=False)
class Relabel:
    src: int
    dst: int
    child: CwExpr

    def __post_init__(self):
        if self.src == self.dst:
            raise ExpressionError(f"relabel needs two distinct labels, got {self.src} twice")
        if self.src < 1 or self.dst < 1:
            raise ExpressionError(f"labels are positive integers, got {self.src}, {self.dst}")


CwExpr = Create | Union | Join | Relabel


@dataclass(frozen=True)
class LabelledGraph:
    graph: Graph
    label_of: dict[Vertex, int]

    @property
    def labels(self) -> frozenset[int]:
        return frozenset(self.label_of.values())

    def group(self, label: int) -> frozenset[Vertex]:
        return frozenset(v for v, lab in self.label_of.items() if lab == label)
