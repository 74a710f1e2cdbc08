from __future__ import annotations

import logging
import random
from collections.abc import Iterator

import networkx as nx

from models.classes import P2P4, ClassSpec
from models.graph import Graph, Vertex, vsorted
from models.partition import SliceDecomposition, TriPartition
from models.uniform import UniformSpec
from services.curious import build_sliced_graph
from services.graph_io import from_networkx
from services.graph_ops import find_nontrivial_module, induced_subgraph
from services.patterns import is_free, rainbow_violation
from services.uniform import realize

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 9
ATLAS_MAX = 7
GROWTH_ATTEMPTS = 40
PRIME_REPAIRS = 25


def _delete(G: Graph, v: Vertex) -> Graph:
    return induced_subgraph(G, [u for u in G.vertices if u != v])


def _repair(G: Graph, patterns: tuple[str, ...]) -> Graph:
    """Delete the smallest vertex of each witness until G is free of `patterns`."""
    while True:
        ok, witness = is_free(G, patterns)
        if ok:
            return G
        assert witness is not None
        G = _delete(G, vsorted(witness.vertices)[0])


def gen_class_random(cls: ClassSpec, n: int, p: float, seed: int) -> Graph:
    H = nx.gnp_random_graph(n, p, seed=seed)
    G = _repair(from_networkx(H), cls.forbidden)
    logger.debug(f"random {cls.name} member: {G.n} of {n} vertices kept")
    return G


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"a cycle needs at least three vertices, got {n}")
    return from_networkx(nx.cycle_graph(n))


def gen_uniform(spec: UniformSpec) -> Graph:
    return realize(spec)


def _c5_roles() -> list[tuple[str, frozenset[int]]]:
    roles = [("U", frozenset())]
    for i in range(5):
        roles.append((f"W{i + 1}", frozenset({i})))
        roles.append((f"V{i + 1}", frozenset({(i - 1) % 5, (i + 1) % 5})))
    return roles


def gen_with_c5(cls: ClassSpec, n: int, seed: int, p: float = 0.3) -> Graph:
    """
    A connected class member grown from the C5 on 0..4 towards n vertices.

    Vertices are added one at a time in a random role around the cycle (no
    cycle neighbour, one, or two at distance two) with random neighbours among
    the earlier additions, keeping only additions that stay in the class.
    For the (K3,P2+P4) class the result is also prime: modules are broken up
    by extra vertices, and the last prime graph seen is returned otherwise.
    """
    if n < 5:
        raise ValueError(f"a graph with an induced C5 needs at least five vertices, got {n}")
    rng = random.Random(seed)
    G = gen_cycle(5)
    roles = _c5_roles()
    last_prime = G
    next_id = 5

    def attempt(forced: frozenset[Vertex] = frozenset()) -> Graph | None:
        _, cycle_nb = rng.choice(roles)
        extras = [v for v in G.vertices if v >= 5 and rng.random() < p]
        nb = set(cycle_nb) | set(extras) | set(forced)
        if not nb:
            return None
        adj = {v: set(G.neighbours(v)) for v in G.vertices}
        adj[next_id] = nb
        for u in nb:
            adj[u].add(next_id)
        H = Graph(adj)
        ok, _ = is_free(H, cls.forbidden)
        return H if ok else None

    misses = 0
    while G.n < n and misses < GROWTH_ATTEMPTS:
        H = attempt()
        if H is None:
            misses += 1
            continue
        G, next_id, misses = H, next_id + 1, 0
        if cls == P2P4 and find_nontrivial_module(G) is None:
            last_prime = G

    if cls != P2P4:
        return G
    for _ in range(PRIME_REPAIRS):
        module = find_nontrivial_module(G)
        if module is None:
            return G
        # a vertex seeing exactly one module vertex splits the module
        pick = rng.choice(vsorted(module))
        H = attempt(frozenset({pick}))
        if H is not None and not (H.neighbours(next_id) & (module - {pick})):
            G, next_id = H, next_id + 1
    if find_nontrivial_module(G) is None:
        return G
    logger.debug(f"could not make a prime graph on {G.n} vertices; using {last_prime.n}")
    return last_prime


def gen_curious(n: int, seed: int, p: float = 0.5) -> tuple[Graph, TriPartition]:
    """Random 3-partite graph with a random partition, repaired until no triple is rainbow."""
    rng = random.Random(seed)
    part = {v: rng.randrange(3) for v in range(n)}
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if part[u] != part[v] and rng.random() < p
    ]
    G = Graph.from_edges(range(n), edges)
    while True:
        P = TriPartition.of([[v for v in G.vertices if part[v] == q] for q in range(3)])
        found = rainbow_violation(G, P)
        if found is None:
            return G, P
        G = _delete(G, found.triple[rng.randrange(3)])


def gen_sliced(
    slice_count: int, slice_size: int, seed: int, p: float = 0.5
) -> tuple[Graph, SliceDecomposition]:
    """Random slices on consecutive ids, joined by the cross-slice rule."""
    rng = random.Random(seed)
    slices = []
    base = 0
    for _ in range(slice_count):
        ids = list(range(base, base + slice_size))
        base += slice_size
        part = {v: rng.randrange(3) for v in ids}
        edges = [
            (u, v)
            for i, u in enumerate(ids)
            for v in ids[i + 1 :]
            if part[u] != part[v] and rng.random() < p
        ]
        g = Graph.from_edges(ids, edges)
        slices.append((g, TriPartition.of([[v for v in ids if part[v] == q] for q in range(3)])))
    return build_sliced_graph(slices)


def _atlas(n: int) -> Iterator[nx.Graph]:
    for H in nx.graph_atlas_g():
        if H.number_of_nodes() == n:
            yield H
        elif H.number_of_nodes() > n:
            return


def _extend(smaller: list[nx.Graph], n: int) -> list[nx.Graph]:
    """All graphs on n vertices up to isomorphism, as one-vertex extensions of `smaller`."""
    buckets: dict[str, list[nx.Graph]] = {}
    out: list[nx.Graph] = []
    for H in smaller:
        for mask in range(1 << (n - 1)):
            K = H.copy()
            K.add_node(n - 1)
            K.add_edges_from((i, n - 1) for i in range(n - 1) if mask >> i & 1)
            key = f"{K.number_of_edges()}:{nx.weisfeiler_lehman_graph_hash(K)}"
            seen = buckets.setdefault(key, [])
            if any(nx.is_isomorphic(K, other) for other in seen):
                continue
            seen.append(K)
            out.append(K)
    return out


def enumerate_small(n: int, cls: ClassSpec | None = None) -> Iterator[Graph]:
    """All graphs on n vertices up to isomorphism (vertices 0..n-1), optionally class members."""
    if n < 0 or n > ENUMERATION_CAP:
        raise ValueError(f"enumeration is limited to 0..{ENUMERATION_CAP} vertices, got {n}")
    if n <= ATLAS_MAX:
        graphs = list(_atlas(n))
    else:
        graphs = list(_atlas(ATLAS_MAX))
        for m in range(ATLAS_MAX + 1, n + 1):
            graphs = _extend(graphs, m)
            logger.info(f"{len(graphs)} graphs on {m} vertices")
    for H in graphs:
        G = from_networkx(H)
        if cls is not None and not is_free(G, cls.forbidden)[0]:
            continue
        yield G
