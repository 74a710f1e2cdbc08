from __future__ import annotations

from itertools import combinations, product

import pytest

from models.errors import ExpressionError
from models.graph import Graph
from models.uniform import UniformSpec
from services.cwx import verify, width
from services.graph_ops import induced_subgraph
from services.oracle import CliqueWidthOracle
from services.patterns import find_induced
from services.uniform import (
    realize,
    recognize_3uniform_special,
    special_3uniform_spec,
    uniform_cw_expr,
)


def two_class_specs():
    for edge, (a, b, c) in product((False, True), product((0, 1), repeat=3)):
        F = Graph.from_edges([1, 2], [(1, 2)] if edge else [])
        yield UniformSpec(k=2, K=((a, b), (b, c)), F=F, m=3)


def test_small_uniform_graphs_have_width_at_most_2k():
    for spec in two_class_specs():
        G = realize(spec)
        assert G.n == 6
        e = uniform_cw_expr(spec)
        assert verify(e, G)
        assert width(e) <= 2 * spec.k


def test_within_class_toggle():
    F = Graph.from_edges([1], [])
    G = realize(UniformSpec(k=1, K=((1,),), F=F, m=4))
    assert G.edge_count == 6
    G = realize(UniformSpec(k=1, K=((0,),), F=F, m=4))
    assert G.edge_count == 0


def test_spec_validation():
    F = Graph.from_edges([1, 2], [])
    with pytest.raises(ValueError):
        UniformSpec(k=2, K=((0, 1), (0, 0)), F=F, m=1)
    with pytest.raises(ValueError):
        UniformSpec(k=2, K=((0, 2), (2, 0)), F=F, m=1)
    with pytest.raises(ValueError):
        UniformSpec(k=3, K=((0,) * 3,) * 3, F=F, m=1)
    with pytest.raises(ValueError):
        UniformSpec(k=2, K=((0, 0), (0, 0)), F=F, m=-1)
    spec = special_3uniform_spec(2)
    assert UniformSpec.from_json(spec.to_json()) == spec


def test_no_copies_means_no_expression():
    with pytest.raises(ExpressionError):
        uniform_cw_expr(special_3uniform_spec(0))
    with pytest.raises(ExpressionError):
        uniform_cw_expr(special_3uniform_spec(1), copies=[(0, 1)])


def test_special_graph_is_triangle_free():
    for m in range(1, 5):
        G = realize(special_3uniform_spec(m))
        assert find_induced(G, "K3") is None
        assert verify(uniform_cw_expr(special_3uniform_spec(m)), G)


def special_parts(G: Graph):
    return tuple(frozenset(v for v in G.vertices if v % 3 == r) for r in range(3))


def test_recognize_special_graph():
    G = realize(special_3uniform_spec(4))
    found = recognize_3uniform_special(G, special_parts(G))
    assert found is not None
    assert found.spec.m == 4
    e = uniform_cw_expr(found.spec, found.copies)
    assert verify(e, G)
    assert width(e) <= 6


def test_recognize_with_missing_slots():
    G = induced_subgraph(realize(special_3uniform_spec(3)), [1, 2, 3, 4, 5, 6, 8])
    found = recognize_3uniform_special(G, special_parts(G))
    assert found is not None
    assert (None, 1, 2) in found.copies
    assert verify(uniform_cw_expr(found.spec, found.copies), G)


def test_recognize_rejects_other_graphs():
    G = realize(special_3uniform_spec(2))
    A, B, U = special_parts(G)
    assert recognize_3uniform_special(G, (A | B, frozenset(), U)) is None
    H = induced_subgraph(G, A | B)
    assert recognize_3uniform_special(H, (A, B, frozenset())) is None


def all_specs(k: int, m: int):
    cells = [(i, j) for i in range(k) for j in range(i, k)]
    pairs = list(combinations(range(1, k + 1), 2))
    for bits in product((0, 1), repeat=len(cells)):
        K = [[0] * k for _ in range(k)]
        for (i, j), bit in zip(cells, bits, strict=True):
            K[i][j] = K[j][i] = bit
        for chosen in product((False, True), repeat=len(pairs)):
            F = Graph.from_edges(range(1, k + 1), [e for e, on in zip(pairs, chosen) if on])
            yield UniformSpec(k=k, K=tuple(map(tuple, K)), F=F, m=m)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_width_at_most_2k_against_the_oracle(k):
    oracle = CliqueWidthOracle(cap=8)
    for spec in all_specs(k, m=2):
        G = realize(spec)
        e = uniform_cw_expr(spec)
        assert verify(e, G)
        exact = oracle.exact_cw(G, 2 * k)
        assert exact is not None
        assert exact <= width(e) <= 2 * k
