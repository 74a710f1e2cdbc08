from __future__ import annotations

import logging
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, NamedTuple

import networkx as nx

from models.graph import Graph, Vertex, vsorted
from models.partition import TriPartition
from services.graph_io import from_networkx

logger = logging.getLogger(__name__)

_COMPONENT = re.compile(r"^(\d*)(P|C|K|S)(\d+(?:,\d+)*)$")

CATALOG_NAMES = (
    "K3",
    "2P2",
    "P4",
    "3P1",
    "C5",
    "C7",
    "P2+P4",
    "P1+P5",
    "P1+2P2",
    "P6",
    "P7",
    "S1,2,3",
    "K1,3",
)


@dataclass(frozen=True)
class Witness:
    pattern_name: str
    vertex_map: dict[Vertex, Vertex]

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(self.vertex_map.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "pattern": self.pattern_name,
            "vertex_map": [[p, h] for p, h in self.vertex_map.items()],
        }


class Rainbow(NamedTuple):
    kind: str
    triple: tuple[Vertex, Vertex, Vertex]


def _normalize(name: str) -> str:
    return name.replace(" ", "").replace("_", "").replace("{", "").replace("}", "")


def _component(token: str) -> nx.Graph:
    match = _COMPONENT.match(token)
    if not match:
        raise ValueError(f"unknown pattern component: {token!r}")
    mult, family, args = match.groups()
    sizes = [int(a) for a in args.split(",")]
    if family == "P" and len(sizes) == 1:
        base = nx.path_graph(sizes[0])
    elif family == "C" and len(sizes) == 1 and sizes[0] >= 3:
        base = nx.cycle_graph(sizes[0])
    elif family == "K" and len(sizes) == 1:
        base = nx.complete_graph(sizes[0])
    elif family == "K" and len(sizes) == 2:
        base = nx.complete_bipartite_graph(*sizes)
    elif family == "S" and len(sizes) == 3:
        base = _subdivided_claw(*sizes)
    else:
        raise ValueError(f"unknown pattern component: {token!r}")
    copies = int(mult) if mult else 1
    return nx.disjoint_union_all([base] * copies)


def _subdivided_claw(h: int, i: int, j: int) -> nx.Graph:
    T = nx.Graph()
    T.add_node(0)
    nxt = 1
    for length in (h, i, j):
        prev = 0
        for _ in range(length):
            T.add_edge(prev, nxt)
            prev = nxt
            nxt += 1
    return T


@lru_cache(maxsize=None)
def pattern(name: str) -> Graph:
    """Catalog graph for names like "K3", "P2+P4", "2P2", "S1,2,3", "K1,3"."""
    parts = [_component(tok) for tok in _normalize(name).split("+")]
    return from_networkx(nx.convert_node_labels_to_integers(nx.disjoint_union_all(parts)))


CATALOG: dict[str, Graph] = {name: pattern(name) for name in CATALOG_NAMES}


def iter_embeddings(
    host: Graph,
    pat: Graph,
    candidates: Mapping[Vertex, Iterable[Vertex]] | None = None,
) -> Iterator[dict[Vertex, Vertex]]:
    """
    Induced embeddings of `pat` into `host` in lexicographic order of the
    host ids listed in pattern-vertex order. `candidates` optionally restricts
    the images of individual pattern vertices.
    """
    k = pat.n
    if k > host.n:
        return
    if k == 0:
        yield {}
        return
    hmask = host.masks
    pmask = pat.masks
    hdeg = [bin(m).count("1") for m in hmask]
    pdeg = [bin(m).count("1") for m in pmask]
    allowed_by_degree = []
    for j, pv in enumerate(pat.vertices):
        m = 0
        for i, d in enumerate(hdeg):
            if d >= pdeg[j]:
                m |= 1 << i
        if candidates is not None and pv in candidates:
            m &= host.mask_of(v for v in candidates[pv] if v in host)
        allowed_by_degree.append(m)
    if any(m == 0 for m in allowed_by_degree):
        return

    image = [0] * k
    stack: list[tuple[int, int]] = [(0, _allowed(0, 0, image, allowed_by_degree, pmask, hmask))]
    used = 0
    while stack:
        j, remaining = stack[-1]
        if not remaining:
            stack.pop()
            if stack:
                used &= ~(1 << image[stack[-1][0]])
            continue
        low = remaining & -remaining
        stack[-1] = (j, remaining & ~low)
        image[j] = low.bit_length() - 1
        if j + 1 == k:
            yield {pat.vertices[t]: host.vertices[image[t]] for t in range(k)}
            continue
        used |= low
        nxt = _allowed(j + 1, used, image, allowed_by_degree, pmask, hmask)
        stack.append((j + 1, nxt))


def _allowed(
    j: int,
    used: int,
    image: list[int],
    base: list[int],
    pmask: tuple[int, ...],
    hmask: tuple[int, ...],
) -> int:
    m = base[j] & ~used
    for t in range(j):
        if (pmask[j] >> t) & 1:
            m &= hmask[image[t]]
        else:
            m &= ~hmask[image[t]]
        if not m:
            break
    return m


def _resolve(H: Graph | str) -> tuple[Graph, str]:
    if isinstance(H, str):
        return pattern(H), H
    return H, "custom"


def find_induced(G: Graph, H: Graph | str, name: str | None = None) -> Witness | None:
    pat, default_name = _resolve(H)
    for emb in iter_embeddings(G, pat):
        return Witness(name or default_name, emb)
    return None


def is_free(G: Graph, patterns: Iterable[Graph | str]) -> tuple[bool, Witness | None]:
    for H in patterns:
        w = find_induced(G, H)
        if w is not None:
            logger.debug(f"found induced {w.pattern_name} at {list(w.vertices)}")
            return False, w
    return True, None


def find_induced_cycle(G: Graph, length: int) -> Witness | None:
    if length < 4:
        raise ValueError(f"induced cycle length must be at least 4, got {length}")
    if length > G.n:
        return None
    return find_induced(G, pattern(f"C{length}"), name=f"C{length}")


def rainbow_violation(G: Graph, P: TriPartition) -> Rainbow | None:
    """First rainbow K3 or 3P1 (one vertex per part, lexicographic), if any."""
    P.validate(G)
    for a in vsorted(P.v1):
        na = G.neighbours(a)
        for b in vsorted(P.v2):
            ab = b in na
            nb = G.neighbours(b)
            for c in vsorted(P.v3):
                ac = c in na
                bc = c in nb
                if ab and ac and bc:
                    return Rainbow("K3", (a, b, c))
                if not (ab or ac or bc):
                    return Rainbow("3P1", (a, b, c))
    return None


def find_2p2s(
    G: Graph, A: Iterable[Vertex], B: Iterable[Vertex]
) -> Iterator[tuple[Vertex, Vertex, Vertex, Vertex]]:
    """
    Induced 2P2s of G[A ∪ B] with edges a1-b1 and a2-b2 (A, B independent),
    yielded as (a1, a2, b1, b2) in lexicographic order with a1 < a2.
    """
    bset = frozenset(B)
    alist = vsorted(A)
    nbs = {a: G.neighbours(a) & bset for a in alist}
    for i, a1 in enumerate(alist):
        for a2 in alist[i + 1 :]:
            only1 = nbs[a1] - nbs[a2]
            if not only1:
                continue
            only2 = nbs[a2] - nbs[a1]
            if not only2:
                continue
            for b1 in vsorted(only1):
                for b2 in vsorted(only2):
                    yield a1, a2, b1, b2


def pair_has_2P2(G: Graph, A: Iterable[Vertex], B: Iterable[Vertex]) -> bool:
    return next(find_2p2s(G, A, B), None) is not None
