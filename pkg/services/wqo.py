from __future__ import annotations

from collections.abc import Callable, Hashable, Sequence
from itertools import product

from models.graph import Vertex
from models.poset import LabelledGraphW, Poset
from services.patterns import iter_embeddings


def find_labelled_embedding(
    G: LabelledGraphW, H: LabelledGraphW, P: Poset
) -> dict[Vertex, Vertex] | None:
    """Induced embedding of G into H that never lowers a label, or None."""
    for lg in (G, H):
        for v, label in lg.labels.items():
            if label not in P:
                raise ValueError(f"label {label!r} of vertex {v!r} is not in the poset")
    candidates = {
        v: [w for w in H.graph.vertices if P.le(G.labels[v], H.labels[w])]
        for v in G.graph.vertices
    }
    return next(iter_embeddings(H.graph, G.graph, candidates), None)


def labelled_embeds(G: LabelledGraphW, H: LabelledGraphW, P: Poset) -> bool:
    return find_labelled_embedding(G, H, P) is not None


def higman_embedding(
    a: Sequence, b: Sequence, leq: Callable[[object, object], bool]
) -> list[int] | None:
    """Greedy: match each a_j with the first remaining b_i it is below."""
    out: list[int] = []
    i = 0
    for x in a:
        while i < len(b) and not leq(x, b[i]):
            i += 1
        if i == len(b):
            return None
        out.append(i)
        i += 1
    return out


def higman_leq(a: Sequence, b: Sequence, leq: Callable[[object, object], bool]) -> bool:
    return higman_embedding(a, b, leq) is not None


def product_poset(P1: Poset, P2: Poset) -> Poset:
    elements: tuple[Hashable, ...] = tuple(product(P1.elements, P2.elements))
    relation = frozenset(
        (x, y)
        for x in elements
        for y in elements
        if P1.le(x[0], y[0]) and P2.le(x[1], y[1])  # type: ignore[index]
    )
    return Poset(elements, relation)
