from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings

from models.errors import EditError, UnknownVertexError
from models.graph import BipartiteComplementation, EditLog, Graph, VertexDeletion
from services.graph_io import (
    graph_from_graph6,
    graph_from_json,
    graph_to_graph6,
    graph_to_json,
    read_graph,
    to_networkx,
    write_graph,
)
from services.graph_ops import (
    apply_edit,
    bipartition,
    complement,
    connected_components,
    disjoint_union,
    false_twins,
    find_nontrivial_module,
    induced_subgraph,
    is_module,
    is_prime,
    modular_decomposition,
    recompose,
    relabel_consecutive,
    replay,
)
from scripts.strategies import cycle, graphs, path


def test_graph_rejects_self_loops_and_unknown_vertices():
    with pytest.raises(ValueError):
        Graph.from_edges([0, 1], [(0, 0)])
    with pytest.raises(UnknownVertexError):
        Graph.from_edges([0, 1], [(0, 2)])
    with pytest.raises(UnknownVertexError):
        cycle(4).neighbours(9)


def test_mixed_vertex_ids_sort_ints_first():
    G = Graph.from_edges(["b", 2, "a", 1], [(1, "a")])
    assert G.vertices == (1, 2, "a", "b")
    assert G.has_edge("a", 1)


def test_deletion_and_bipartite_complementation():
    G = path(4)
    H = apply_edit(G, BipartiteComplementation(frozenset({0}), frozenset({1, 3})))
    assert not H.has_edge(0, 1)
    assert H.has_edge(0, 3)
    assert H.has_edge(1, 2)
    H = apply_edit(H, VertexDeletion(2))
    assert H.vertices == (0, 1, 3)
    assert H.edges() == [(0, 3)]


def test_overlapping_sides_are_rejected():
    with pytest.raises(EditError):
        apply_edit(path(3), BipartiteComplementation(frozenset({0, 1}), frozenset({1, 2})))


def test_replay_accepts_a_log():
    G = cycle(5)
    ops = (VertexDeletion(4), BipartiteComplementation(frozenset({0}), frozenset({2})))
    log = EditLog(input_graph_hash=G.digest(), ops=ops)
    assert replay(G, log) == replay(G, ops)
    assert replay(G, log).edges() == [(0, 1), (0, 2), (1, 2), (2, 3)]


@given(graphs())
def test_complement_is_an_involution(G):
    assert complement(complement(G)) == G
    assert G.edge_count + complement(G).edge_count == G.n * (G.n - 1) // 2


@given(graphs())
def test_components_match_networkx(G):
    ours = {frozenset(c) for c in connected_components(G)}
    theirs = {frozenset(c) for c in nx.connected_components(to_networkx(G))}
    assert ours == theirs


@given(graphs())
def test_bipartition_matches_networkx(G):
    found = bipartition(G)
    assert (found is not None) == nx.is_bipartite(to_networkx(G))
    if found is not None:
        a, b = found
        assert G.is_independent(a) and G.is_independent(b)
        assert a | b == frozenset(G.vertices)


def test_disjoint_union_and_relabel():
    G = Graph.from_edges(["x", "y"], [("x", "y")])
    U = disjoint_union([G, path(2)])
    assert U.n == 4 and U.edge_count == 2
    with pytest.raises(ValueError):
        disjoint_union([path(2), path(3)])
    R, mapping = relabel_consecutive(U)
    assert R.vertices == (0, 1, 2, 3)
    assert R.has_edge(mapping["x"], mapping["y"])


def test_modules_of_small_graphs():
    assert is_prime(path(4))
    assert is_prime(cycle(5))
    assert not is_prime(cycle(4))
    assert find_nontrivial_module(cycle(4)) == frozenset({0, 2})
    assert find_nontrivial_module(path(2)) is None
    assert is_module(cycle(4), {1, 3})
    assert not is_module(path(4), {0, 1})
    assert false_twins(cycle(4)) == [(0, 2), (1, 3)]


def test_modular_decomposition_kinds():
    assert modular_decomposition(cycle(5)).kind == "prime"
    assert modular_decomposition(cycle(4)).kind == "series"
    tree = modular_decomposition(disjoint_union([path(2), Graph({"z": ()})]))
    assert tree.kind == "parallel"
    assert len(tree.children) == 2
    with pytest.raises(ValueError):
        modular_decomposition(Graph.empty())


@settings(max_examples=60)
@given(graphs(min_n=1, max_n=7))
def test_modular_decomposition_recomposes(G):
    tree = modular_decomposition(G)
    assert recompose(tree) == G
    for node in tree.iter_nodes():
        if node.kind == "leaf":
            continue
        assert is_module(G, node.vertices)
        if node.kind == "prime":
            assert is_prime(node.quotient)


@given(graphs(min_n=1))
def test_graph6_and_json_keep_the_graph(G):
    assert graph_from_json(graph_to_json(G)) == G
    assert graph_from_graph6(graph_to_graph6(G)) == relabel_consecutive(G)[0]


def test_read_and_write_files(tmp_path):
    G = induced_subgraph(cycle(6), [0, 1, 2, 4])
    write_graph(G, tmp_path / "g.json")
    assert read_graph(tmp_path / "g.json") == G
    write_graph(cycle(5), tmp_path / "c5.g6", fmt="graph6")
    assert read_graph(tmp_path / "c5.g6") == cycle(5)
    with pytest.raises(ValueError):
        write_graph(G, tmp_path / "g.txt", fmt="dot")
