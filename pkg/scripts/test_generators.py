from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.classes import P1P5, P2P4
from services.generators import (
    enumerate_small,
    gen_class_random,
    gen_curious,
    gen_cycle,
    gen_uniform,
    gen_with_c5,
)
from services.graph_ops import connected_components, is_prime
from services.patterns import find_induced_cycle, is_free
from services.uniform import special_3uniform_spec


@pytest.mark.parametrize("n, count", [(0, 1), (1, 1), (2, 2), (3, 4), (4, 11), (5, 34)])
def test_enumeration_counts(n, count):
    graphs = list(enumerate_small(n))
    assert len(graphs) == count
    assert all(G.vertices == tuple(range(n)) for G in graphs)


def test_enumeration_filters_by_class():
    # triangle-free graphs on 4 and 5 vertices are all in both classes
    assert len(list(enumerate_small(4, P2P4))) == 7
    assert len(list(enumerate_small(5, P1P5))) == 14


def test_enumeration_limits():
    with pytest.raises(ValueError):
        list(enumerate_small(10))
    with pytest.raises(ValueError):
        list(enumerate_small(-1))


def test_cycles_and_uniform_graphs():
    assert gen_cycle(6).edge_count == 6
    with pytest.raises(ValueError):
        gen_cycle(2)
    assert gen_uniform(special_3uniform_spec(2)).n == 6


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=0, max_value=12))
def test_random_members(seed, n):
    for cls in (P1P5, P2P4):
        G = gen_class_random(cls, n, 0.3, seed)
        assert G.n <= n
        assert is_free(G, cls.forbidden)[0]
    assert gen_class_random(P2P4, n, 0.3, seed) == gen_class_random(P2P4, n, 0.3, seed)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=5, max_value=12))
def test_graphs_grown_around_c5(seed, n):
    G = gen_with_c5(P1P5, n, seed)
    assert 5 <= G.n <= n
    assert is_free(G, P1P5.forbidden)[0]
    assert len(connected_components(G)) == 1
    assert find_induced_cycle(G, 5) is not None
    H = gen_with_c5(P2P4, n, seed)
    assert is_free(H, P2P4.forbidden)[0]
    assert is_prime(H)


def test_c5_growth_needs_five_vertices():
    with pytest.raises(ValueError):
        gen_with_c5(P2P4, 4, seed=0)


def test_curious_generation_is_seeded():
    G, P = gen_curious(9, seed=3)
    again, Q = gen_curious(9, seed=3)
    assert G == again and P == Q
    assert P.vertices == frozenset(G.vertices)
