from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ClassSpec:
    name: str
    forbidden: tuple[str, ...]


P2P4 = ClassSpec(name="K3,P2+P4", forbidden=("K3", "P2+P4"))
P1P5 = ClassSpec(name="K3,P1+P5", forbidden=("K3", "P1+P5"))

CLASSES: dict[str, ClassSpec] = {c.name: c for c in (P2P4, P1P5)}

_ALIASES = {
    "p2p4": P2P4,
    "p2+p4": P2P4,
    "k3,p2+p4": P2P4,
    "p1p5": P1P5,
    "p1+p5": P1P5,
    "k3,p1+p5": P1P5,
}


def class_by_name(name: str) -> ClassSpec:
    key = name.strip().lower().replace(" ", "").replace("(", "").replace(")", "")
    key = key.removesuffix("-free")
    if key in _ALIASES:
        return _ALIASES[key]
    raise ValueError(f"unknown graph class {name!r}; expected one of {sorted(CLASSES)}")
