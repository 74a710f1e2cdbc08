from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from models.graph import Graph, Vertex


@dataclass(frozen=True)
class UniformSpec:
    """
    A k-uniform graph: m copies of the base graph F on 1..k, vertex i of every
    copy forming the class V_i; K(i, j) = 1 toggles all pairs between V_i and
    V_j (within V_i when i = j).
    """

    k: int
    K: tuple[tuple[int, ...], ...]
    F: Graph
    m: int

    def __post_init__(self):
        object.__setattr__(self, "K", tuple(tuple(int(x) for x in row) for row in self.K))
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if len(self.K) != self.k or any(len(row) != self.k for row in self.K):
            raise ValueError(f"K must be a {self.k}x{self.k} matrix")
        for i in range(self.k):
            for j in range(self.k):
                if self.K[i][j] not in (0, 1):
                    raise ValueError("K must be a 0/1 matrix")
                if self.K[i][j] != self.K[j][i]:
                    raise ValueError("K must be symmetric")
        if set(self.F.vertices) != set(range(1, self.k + 1)):
            raise ValueError(f"F must have vertex set 1..{self.k}")
        if self.m < 0:
            raise ValueError(f"copy count must be non-negative, got {self.m}")

    def k_entry(self, i: int, j: int) -> int:
        """K(i, j) for 1-based class indices."""
        return self.K[i - 1][j - 1]

    def same_copy_edge(self, i: int, j: int) -> bool:
        return self.F.has_edge(i, j) != bool(self.k_entry(i, j))

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "K": [list(row) for row in self.K],
            "F": [list(e) for e in self.F.edges()],
            "m": self.m,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> UniformSpec:
        k = int(data["k"])
        F = Graph.from_edges(range(1, k + 1), [tuple(e) for e in data.get("F", [])])
        return cls(k=k, K=tuple(tuple(r) for r in data["K"]), F=F, m=int(data["m"]))


@dataclass(frozen=True)
class UniformEmbedding:
    """Vertices of a graph placed into the slots of a uniform spec, one tuple per copy."""

    spec: UniformSpec
    copies: tuple[tuple[Vertex | None, ...], ...]

    def to_json(self) -> dict[str, Any]:
        return {"spec": self.spec.to_json(), "copies": [list(c) for c in self.copies]}
