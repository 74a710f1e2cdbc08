from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.errors import ClaimViolation
from models.graph import Graph
from models.partition import SliceDecomposition, TriPartition
from services.curious import (
    build_sliced_graph,
    compose_slices,
    curious_cw,
    curious_type,
    curious_width_bound,
    is_curious,
    monotone_order,
    recompose_slices,
    slice_sequence,
    slice_type01,
    slice_type23,
    validate_slices,
)
from services.cwx import linear_expression, verify, width
from services.generators import gen_curious, gen_sliced
from services.graph_ops import induced_subgraph
from services.oracle import CliqueWidthOracle
from services.patterns import pair_has_2P2
from scripts.strategies import sided_bipartite_graphs


class RecordingLeaf:
    def __init__(self):
        self.widths: list[int] = []
        self.oracle = CliqueWidthOracle(cap=12)

    def __call__(self, g: Graph):
        e = self.oracle.exact_expression(g, max(g.n, 1))
        self.widths.append(width(e))
        return e


def two_matched_pairs() -> tuple[Graph, TriPartition]:
    """V1 = {0, 1}, V2 = {2, 3} with the 2P2 0-2, 1-3; V3 = {4} sees 0 and 1."""
    G = Graph.from_edges(range(5), [(0, 2), (1, 3), (4, 0), (4, 1)])
    return G, TriPartition.of([[0, 1], [2, 3], [4]])


def test_rainbow_free_partition():
    G, P = two_matched_pairs()
    assert is_curious(G, P)
    assert curious_type(G, P) == 1
    triangle = Graph.from_edges([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    P3 = TriPartition.of([[0], [1], [2]])
    assert not is_curious(triangle, P3)
    with pytest.raises(ClaimViolation) as info:
        curious_type(triangle, P3)
    assert info.value.witness["kind"] == "K3"


def test_type01_slices_are_bipartite():
    G, P = two_matched_pairs()
    D = slice_type01(G, P)
    assert validate_slices(G, D) is None
    assert recompose_slices(D, G) == G
    for j in range(len(D)):
        a, _, c = D.slices[j]
        assert G.is_anticomplete_to(a, c)


def test_monotone_order_needs_2p2_free_pairs():
    G, P = two_matched_pairs()
    with pytest.raises(ClaimViolation):
        monotone_order(G, P)
    H = Graph.from_edges(range(4), [(0, 2), (0, 3), (1, 3)])
    order = monotone_order(H, TriPartition.of([[0, 1], [2, 3], []]))
    assert order == [0, 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=3, max_value=9))
def test_random_curious_graphs_get_bounded_expressions(seed, n):
    G, P = gen_curious(n, seed)
    assert is_curious(G, P)
    if G.n == 0:
        return
    leaf = RecordingLeaf()
    e = curious_cw(G, P, leaf)
    assert verify(e, G)
    if all(P.parts):
        assert width(e) <= curious_width_bound(max(leaf.widths), curious_type(G, P))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=4))
def test_generated_slices_follow_the_cross_rule(seed, count):
    G, D = gen_sliced(count, 3, seed)
    assert len(D) == count
    assert validate_slices(G, D) is None
    assert recompose_slices(D, G) == G


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=4))
def test_compose_slices_width(seed, count):
    G, D = gen_sliced(count, 3, seed)
    exprs = [linear_expression(induced_subgraph(G, D.slice_vertices(j))) for j in range(len(D))]
    e = compose_slices(exprs, D.partition)
    assert verify(e, G)
    assert width(e) <= max(3 * max(width(x) for x in exprs), 6)


def two_slice_type2() -> tuple[Graph, TriPartition]:
    """A 2P2 between V1 and V2 followed by a 2P2 between V2 and V3."""
    first = Graph.from_edges(range(4), [(0, 2), (1, 3)])
    second = Graph.from_edges(range(4, 8), [(4, 6), (5, 7)])
    G, D = build_sliced_graph(
        [
            (first, TriPartition.of([[0, 1], [2, 3], []])),
            (second, TriPartition.of([[], [4, 5], [6, 7]])),
        ]
    )
    return G, D.partition


def test_type2_slicing_lowers_the_type():
    G, P = two_slice_type2()
    assert curious_type(G, P) == 2
    S = slice_type23(G, P)
    assert validate_slices(G, S) is None
    assert S.blocks is not None and len(S.blocks.blocks) == 1
    for j in range(len(S)):
        sub = induced_subgraph(G, S.slice_vertices(j))
        assert curious_type(sub, S.slice_partition(j)) <= 1
    leaf = RecordingLeaf()
    e = curious_cw(G, P, leaf)
    assert verify(e, G)
    assert width(e) <= curious_width_bound(max(leaf.widths), 2)


def test_type23_rejects_low_types():
    G, P = two_matched_pairs()
    with pytest.raises(ClaimViolation):
        slice_type23(G, P)


def test_width_bound_grows_with_type():
    assert curious_width_bound(1, 0) == 6
    assert curious_width_bound(3, 1) == 9
    assert curious_width_bound(3, 2) == 27
    assert curious_width_bound(3, 3) == 81


def test_slice_sequence_of_a_prefix():
    G, D = gen_sliced(3, 3, seed=5)
    first = D.slice_vertices(0)
    H = induced_subgraph(G, first)
    DH = SliceDecomposition(partition=D.partition.restrict(first), slices=(D.slices[0],))
    assert slice_sequence(G, D, H, DH)
    assert not slice_sequence(H, DH, G, D)


@settings(max_examples=200)
@given(sided_bipartite_graphs())
def test_2p2_free_pairs_are_neighbourhood_chains(drawn):
    G, A, B = drawn
    nbs = [G.neighbours(a) for a in A]
    chain = all(x <= y or y <= x for x in nbs for y in nbs)
    assert pair_has_2P2(G, A, B) == (not chain)
    P = TriPartition.of([A, B, []])
    if chain:
        order = monotone_order(G, P)
        assert sorted(order) == sorted(A)
        assert all(
            G.neighbours(x) >= G.neighbours(y) for i, x in enumerate(order) for y in order[i + 1 :]
        )
    else:
        with pytest.raises(ClaimViolation):
            monotone_order(G, P)


def stacked_2p2s(pairs, seed: int) -> tuple[Graph, TriPartition]:
    """
    Slices that are each a 2P2 between two parts, plus single-vertex fillers,
    in shuffled order; vertex ids and the partition frame are then scrambled.
    """
    rng = random.Random(seed)
    kinds = [("2P2", p, q) for p, q in pairs]
    kinds += [("one", rng.randrange(3), 0) for _ in range(rng.randint(1, 3))]
    rng.shuffle(kinds)
    slices = []
    base = 0
    for kind, p, q in kinds:
        parts: list[list[int]] = [[], [], []]
        if kind == "2P2":
            parts[p] += [base, base + 1]
            parts[q] += [base + 2, base + 3]
            g = Graph.from_edges(range(base, base + 4), [(base, base + 2), (base + 1, base + 3)])
            base += 4
        else:
            parts[p].append(base)
            g = Graph.from_edges([base], [])
            base += 1
        slices.append((g, TriPartition.of(parts)))
    G, D = build_sliced_graph(slices)
    old = list(G.vertices)
    new = old[:]
    rng.shuffle(new)
    f = dict(zip(old, new, strict=True))
    H = Graph.from_edges(new, [(f[u], f[v]) for u, v in G.edges()])
    P = TriPartition.of([[f[v] for v in part] for part in D.partition.parts])
    P = P.rotate(rng.randrange(3))
    return H, (P.swap12() if rng.random() < 0.5 else P)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize(
    "pairs, expected",
    [
        ((), 0),
        (((0, 2), (0, 2)), 1),
        (((0, 1), (1, 2)), 2),
        (((2, 0), (1, 2), (1, 2)), 2),
        (((0, 1), (1, 2), (0, 2)), 3),
        (((0, 2), (2, 1), (0, 1), (0, 1)), 3),
    ],
)
def test_curious_graphs_of_every_type(pairs, expected, seed):
    G, P = stacked_2p2s(pairs, seed)
    assert is_curious(G, P)
    assert curious_type(G, P) == expected
    leaf = RecordingLeaf()
    e = curious_cw(G, P, leaf)
    assert verify(e, G)
    if all(P.parts):
        assert width(e) <= curious_width_bound(max(leaf.widths, default=1), expected)
