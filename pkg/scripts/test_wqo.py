from __future__ import annotations

import operator
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.graph import Graph
from models.poset import LabelledGraphW, Poset
from services.wqo import (
    find_labelled_embedding,
    higman_embedding,
    higman_leq,
    labelled_embeds,
    product_poset,
)
from scripts.strategies import cycle, graphs, path


def test_higman_order_on_words():
    assert higman_embedding([1, 2], [0, 1, 5], operator.le) == [1, 2]
    assert higman_embedding([2, 2], [3, 1, 2], operator.le) == [0, 2]
    assert higman_embedding([4], [0, 1, 5], operator.eq) is None
    assert higman_leq([1, 3], [0, 1, 2, 3], operator.le)
    assert not higman_leq([3, 1], [1, 3], operator.le)
    assert higman_leq([], [], operator.le)


def test_poset_validation():
    with pytest.raises(ValueError):
        Poset.from_covers([0, 1], [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Poset(elements=(0, 1), relation=frozenset({(0, 0)}))
    with pytest.raises(ValueError):
        Poset(elements=(0, 0), relation=frozenset({(0, 0)}))


def test_chain_json_and_covers():
    P = Poset.chain(3)
    assert P.le(0, 2) and not P.le(2, 0)
    assert P.covers() == [(0, 1), (1, 2)]
    assert Poset.from_json(P.to_json()) == P


def test_product_poset():
    Q = product_poset(Poset.chain(2), Poset.chain(2))
    assert len(Q.elements) == 4
    assert Q.le((0, 0), (1, 1))
    assert not Q.le((0, 1), (1, 0))


def test_labelled_embedding_respects_labels():
    P = Poset.chain(2)
    small = LabelledGraphW(path(2), {0: 1, 1: 0})
    low = LabelledGraphW(path(3), {0: 0, 1: 0, 2: 0})
    high = LabelledGraphW(path(3), {0: 1, 1: 1, 2: 0})
    assert find_labelled_embedding(small, low, P) is None
    found = find_labelled_embedding(small, high, P)
    assert found is not None
    assert P.le(small.labels[0], high.labels[found[0]])
    assert P.le(small.labels[1], high.labels[found[1]])


def test_embedding_must_be_induced():
    P = Poset.antichain(1)

    def flat(G: Graph) -> LabelledGraphW:
        return LabelledGraphW(G, {v: 0 for v in G.vertices})

    assert not labelled_embeds(flat(path(3)), flat(cycle(3)), P)
    assert labelled_embeds(flat(Graph.from_edges(range(3), [])), flat(cycle(6)), P)


def test_unknown_labels_are_rejected():
    with pytest.raises(ValueError):
        find_labelled_embedding(
            LabelledGraphW(path(2), {0: 5, 1: 0}),
            LabelledGraphW(path(2), {0: 0, 1: 0}),
            Poset.antichain(1),
        )
    with pytest.raises(ValueError):
        LabelledGraphW(path(2), {0: 0})


def subsequence_below(a, b, leq) -> bool:
    return any(
        all(leq(x, b[i]) for x, i in zip(a, picked, strict=True))
        for picked in combinations(range(len(b)), len(a))
    )


words = st.lists(st.integers(min_value=0, max_value=3), max_size=6)


@settings(max_examples=200)
@given(words, words)
def test_higman_agrees_with_exhaustive_search(a, b):
    for leq in (operator.le, operator.eq):
        found = higman_embedding(a, b, leq)
        assert (found is not None) == subsequence_below(a, b, leq)
        if found is not None:
            assert found == sorted(set(found))
            assert all(leq(x, b[i]) for x, i in zip(a, found, strict=True))


def embeds_by_permutation(G: LabelledGraphW, H: LabelledGraphW, P: Poset) -> bool:
    gs = G.graph.vertices
    for image in permutations(H.graph.vertices, len(gs)):
        f = dict(zip(gs, image, strict=True))
        if not all(P.le(G.labels[v], H.labels[f[v]]) for v in gs):
            continue
        if all(
            G.graph.has_edge(u, v) == H.graph.has_edge(f[u], f[v])
            for u, v in combinations(gs, 2)
        ):
            return True
    return False


@st.composite
def labelled_graphs(draw, max_n: int) -> LabelledGraphW:
    G = draw(graphs(max_n=max_n))
    labels = draw(st.lists(st.integers(0, 2), min_size=G.n, max_size=G.n))
    return LabelledGraphW(G, dict(zip(G.vertices, labels, strict=True)))


@settings(max_examples=80, deadline=None)
@given(labelled_graphs(max_n=4), labelled_graphs(max_n=6))
def test_labelled_embedding_agrees_with_brute_force(small, big):
    for P in (Poset.chain(3), Poset.antichain(3)):
        found = find_labelled_embedding(small, big, P)
        assert (found is not None) == embeds_by_permutation(small, big, P)
        assert labelled_embeds(small, big, P) == (found is not None)
