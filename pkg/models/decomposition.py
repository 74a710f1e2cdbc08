from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

from models.graph import EditLog, EditOp, Graph, Vertex, vsorted
from models.partition import TriPartition
from models.uniform import UniformEmbedding

ComponentKind = Literal["curious", "bipartite", "three_uniform"]


@dataclass(frozen=True)
class C5Context:
    """
    Vertices around an induced C5 v1..v5 (stored 0-based, indices mod 5): U sees
    no cycle vertex, W[i] sees only v_i, V[i] sees exactly v_{i-1} and v_{i+1}.
    """

    cycle: tuple[Vertex, ...]
    U: frozenset[Vertex]
    W: tuple[frozenset[Vertex], ...]
    V: tuple[frozenset[Vertex], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "cycle": list(self.cycle),
            "U": vsorted(self.U),
            "W": [vsorted(w) for w in self.W],
            "V": [vsorted(v) for v in self.V],
        }


@dataclass(frozen=True)
class StageRecord:
    name: str
    ops: tuple[EditOp, ...] = ()
    skipped: bool = False
    note: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "ops": [op.to_json() for op in self.ops],
            "skipped": self.skipped,
            "note": self.note,
        }


@dataclass(frozen=True)
class Component:
    graph: Graph
    kind: ComponentKind
    certificate: TriPartition | UniformEmbedding

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "vertices": list(self.graph.vertices),
            "edges": [list(e) for e in self.graph.edges()],
            "certificate": self.certificate.to_json(),
        }


@dataclass(frozen=True)
class DecompositionReport:
    """Edits that turn the input into the disjoint union of `components`."""

    class_name: str
    edit_log: EditLog
    components: tuple[Component, ...]
    budget: dict[str, int]
    context: C5Context | None = None
    stages: tuple[StageRecord, ...] = ()
    used: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "class": self.class_name,
            "edit_log": self.edit_log.to_json(),
            "components": [c.to_json() for c in self.components],
            "budget": dict(self.budget),
            "used": dict(self.used),
            "context": self.context.to_json() if self.context else None,
            "stages": [s.to_json() for s in self.stages],
        }
