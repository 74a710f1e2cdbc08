from __future__ import annotations

from typing import Any


class TrifreeError(Exception):
    """Base class for every error raised by this package."""


class UnknownVertexError(TrifreeError, KeyError):
    def __init__(self, vertex: Any):
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self) -> str:
        return f"unknown vertex id: {self.vertex!r}"


class EditError(TrifreeError, ValueError):
    pass


class ExpressionError(TrifreeError, ValueError):
    pass


class PartitionError(TrifreeError, ValueError):
    pass


class OracleCapError(TrifreeError, ValueError):
    pass


class ClaimViolation(TrifreeError):
    """A structural claim that a decomposition step relies on did not hold.

    `claim` is a readable statement of what was expected, `stage` names the step
    that checked it and `witness` carries whatever evidence was found (forbidden
    subgraph, non-trivial module, offending vertices).
    """

    def __init__(self, claim: str, *, stage: str = "", witness: dict[str, Any] | None = None):
        self.claim = claim
        self.stage = stage
        self.witness = witness or {}
        where = f" [{stage}]" if stage else ""
        super().__init__(f"claim failed{where}: {claim}")

    def to_json(self) -> dict[str, Any]:
        return {"claim": self.claim, "stage": self.stage, "witness": self.witness}


class MembershipError(TrifreeError):
    def __init__(self, class_name: str, witness: Any):
        self.class_name = class_name
        self.witness = witness
        super().__init__(f"graph is not ({class_name})-free: contains {witness.pattern_name}")
