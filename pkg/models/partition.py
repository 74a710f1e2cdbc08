from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from models.errors import PartitionError
from models.graph import Graph, Vertex, vsorted

Slice = tuple[frozenset[Vertex], frozenset[Vertex], frozenset[Vertex]]


@dataclass(frozen=True)
class TriPartition:
    v1: frozenset[Vertex]
    v2: frozenset[Vertex]
    v3: frozenset[Vertex]

    def __post_init__(self):
        for name in ("v1", "v2", "v3"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    @classmethod
    def of(cls, parts) -> TriPartition:
        a, b, c = parts
        return cls(frozenset(a), frozenset(b), frozenset(c))

    @property
    def parts(self) -> tuple[frozenset[Vertex], frozenset[Vertex], frozenset[Vertex]]:
        return (self.v1, self.v2, self.v3)

    @property
    def vertices(self) -> frozenset[Vertex]:
        return self.v1 | self.v2 | self.v3

    def part_of(self, v: Vertex) -> int:
        for i, part in enumerate(self.parts):
            if v in part:
                return i
        raise PartitionError(f"vertex {v!r} is in no part")

    def rotate(self, r: int) -> TriPartition:
        p = self.parts
        return TriPartition(p[r % 3], p[(r + 1) % 3], p[(r + 2) % 3])

    def swap12(self) -> TriPartition:
        return TriPartition(self.v2, self.v1, self.v3)

    def restrict(self, vertices) -> TriPartition:
        keep = frozenset(vertices)
        return TriPartition(self.v1 & keep, self.v2 & keep, self.v3 & keep)

    def validate(self, G: Graph) -> None:
        if self.v1 & self.v2 or self.v1 & self.v3 or self.v2 & self.v3:
            raise PartitionError("parts are not pairwise disjoint")
        if self.vertices != frozenset(G.vertices):
            missing = vsorted(frozenset(G.vertices) - self.vertices)
            extra = vsorted(self.vertices - frozenset(G.vertices))
            raise PartitionError(f"parts do not cover the graph (missing {missing}, extra {extra})")
        for i, part in enumerate(self.parts, start=1):
            if not G.is_independent(part):
                raise PartitionError(f"part V{i} is not an independent set")

    def to_json(self) -> list[list[Vertex]]:
        return [vsorted(p) for p in self.parts]

    @classmethod
    def from_json(cls, data: list[list[Vertex]]) -> TriPartition:
        if len(data) != 3:
            raise PartitionError(f"expected three parts, got {len(data)}")
        return cls.of(data)


@dataclass(frozen=True)
class BlockStructure:
    """
    Ordered blocks of a 2P2 packing between V1 and V2 with the residue and
    V3 classes derived from them. Index i of `y1`, `y2` and `v3` is the class
    sitting after block i (index 0 comes before the first block).
    """

    blocks: tuple[tuple[frozenset[Vertex], frozenset[Vertex]], ...]
    r1: frozenset[Vertex]
    r2: frozenset[Vertex]
    y1: tuple[frozenset[Vertex], ...]
    y2: tuple[frozenset[Vertex], ...]
    v3: tuple[frozenset[Vertex], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "blocks": [[vsorted(b1), vsorted(b2)] for b1, b2 in self.blocks],
            "r1": vsorted(self.r1),
            "r2": vsorted(self.r2),
            "y1": [vsorted(s) for s in self.y1],
            "y2": [vsorted(s) for s in self.y2],
            "v3": [vsorted(s) for s in self.v3],
        }


@dataclass(frozen=True)
class SliceDecomposition:
    """
    Slices of a 3-partite graph. `partition` is the frame the slices are
    expressed in: slice j is (V1^j, V2^j, V3^j) with Vi taken from that frame.
    """

    partition: TriPartition
    slices: tuple[Slice, ...]
    blocks: BlockStructure | None = None

    def __len__(self) -> int:
        return len(self.slices)

    def slice_vertices(self, j: int) -> frozenset[Vertex]:
        a, b, c = self.slices[j]
        return a | b | c

    def slice_partition(self, j: int) -> TriPartition:
        return TriPartition.of(self.slices[j])

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "partition": self.partition.to_json(),
            "slices": [[vsorted(p) for p in s] for s in self.slices],
        }
        if self.blocks is not None:
            out["blocks"] = self.blocks.to_json()
        return out
