from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Literal

from models.decomposition import DecompositionReport
from models.expr import CwExpr
from models.graph import ModuleNode, Vertex

PrimeCaseKind = Literal["C7", "C5", "bipartite"]
LeafSource = Literal["oracle", "fallback", "uniform"]


@dataclass(frozen=True)
class LeafRecord:
    vertices: tuple[Vertex, ...]
    source: LeafSource
    width: int
    unbounded_leaf: bool = False

    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "source": self.source,
            "width": self.width,
            "unbounded_leaf": self.unbounded_leaf,
        }


@dataclass(frozen=True)
class PrimeCase:
    """
    How one prime quotient of the modular decomposition was handled.

    `structural_width` is the width of the expression built along the
    decomposition; `width` is that of the expression actually used, which may
    come from the oracle when the quotient is small enough.
    """

    index: int
    vertices: tuple[Vertex, ...]
    case: PrimeCaseKind
    width: int
    structural_width: int
    bound: int
    leaves: tuple[LeafRecord, ...] = ()
    report: DecompositionReport | None = None
    colours: int = 1

    def to_json(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "vertices": list(self.vertices),
            "case": self.case,
            "width": self.width,
            "structural_width": self.structural_width,
            "bound": self.bound,
            "colours": self.colours,
            "leaves": [leaf.to_json() for leaf in self.leaves],
            "report": self.report.to_json() if self.report is not None else None,
        }


@dataclass(frozen=True)
class PipelineTrace:
    tree: ModuleNode
    primes: tuple[PrimeCase, ...] = ()

    @property
    def unbounded_leaf(self) -> bool:
        return any(leaf.unbounded_leaf for p in self.primes for leaf in p.leaves)

    def to_json(self) -> dict[str, Any]:
        return {
            "tree": self.tree.to_json(),
            "primes": [p.to_json() for p in self.primes],
            "unbounded_leaf": self.unbounded_leaf,
        }


@dataclass(frozen=True)
class PipelineResult:
    expr: CwExpr
    width: int
    bound: int
    trace: PipelineTrace

