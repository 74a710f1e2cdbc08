from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.classes import P1P5, P2P4, ClassSpec
from models.errors import ClaimViolation, MembershipError
from models.graph import EditLog, Graph
from models.uniform import UniformEmbedding
from services.c5_decomp import (
    P1P5_BUDGET,
    P2P4_BUDGET,
    check_report,
    decompose,
    decompose_p1p5,
    decompose_p2p4,
    orientations,
    partition_around_c5,
    report_problems,
)
from services.generators import gen_with_c5
from services.graph_ops import is_prime, replay
from services.patterns import find_induced_cycle, rainbow_violation
from scripts.strategies import c5_with_pendant, c5_with_uniform_star, cycle

C5_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]


def c5_plus(extra: dict[int, list[int]]) -> Graph:
    edges = list(C5_EDGES)
    for v, nbs in extra.items():
        edges += [(v, u) for u in nbs]
    return Graph.from_edges(range(5 + len(extra)), edges)


def test_orientations_start_with_the_given_cycle():
    out = orientations((0, 1, 2, 3, 4))
    assert len(out) == 10 and len(set(out)) == 10
    assert out[0] == (0, 1, 2, 3, 4)
    assert out[1] == (1, 2, 3, 4, 0)
    assert out[5] == (0, 4, 3, 2, 1)


def test_partition_around_c5():
    G = c5_plus({5: [], 6: [0], 7: [0, 2], 8: [0, 3]})
    ctx = partition_around_c5(G, (0, 1, 2, 3, 4))
    assert ctx.U == frozenset({5})
    assert ctx.W[0] == frozenset({6})
    assert ctx.V[1] == frozenset({7})
    assert ctx.V[4] == frozenset({8})


def test_partition_rejects_bad_cycles():
    G = cycle(5)
    with pytest.raises(ValueError):
        partition_around_c5(G, (0, 2, 1, 3, 4))
    with pytest.raises(ValueError):
        partition_around_c5(G, (0, 1, 2, 3))
    with pytest.raises(ClaimViolation) as info:
        partition_around_c5(c5_plus({5: [0, 1]}), (0, 1, 2, 3, 4))
    assert sorted(info.value.witness["K3"]) == [0, 1, 5]


@pytest.mark.parametrize("run", [decompose_p1p5, decompose_p2p4])
def test_bare_c5_is_five_deletions(run):
    report = run(cycle(5))
    assert report.components == ()
    assert report.used["deletions"] == 5
    assert report.used["bipartite_complementations"] == 0
    assert replay(cycle(5), report.edit_log) == Graph.empty()
    assert check_report(cycle(5), report)


def test_pendant_in_p1p5_is_cut_off_by_one_complementation():
    G = c5_with_pendant()
    report = decompose_p1p5(G)
    assert report.used == {
        "deletions": 5,
        "bipartite_complementations": 1,
        "curious": 1,
        "three_uniform": 0,
    }
    (comp,) = report.components
    assert comp.graph.vertices == (5,)
    assert report_problems(G, report) == []
    names = [s.name for s in report.stages if not s.skipped]
    assert names[-1] == "delete cycle"


def test_pendant_in_p2p4_needs_only_deletions():
    G = c5_with_pendant()
    report = decompose_p2p4(G)
    assert report.used["deletions"] == 5
    assert report.used["bipartite_complementations"] == 0
    assert [c.graph.vertices for c in report.components] == [(5,)]
    assert check_report(G, report)


def test_preconditions():
    with pytest.raises(MembershipError):
        decompose_p1p5(c5_plus({5: [0, 1]}))
    with pytest.raises(ClaimViolation) as info:
        decompose_p1p5(c5_plus({5: []}))
    assert info.value.stage == "decompose_p1p5"
    with pytest.raises(ClaimViolation) as info:
        decompose_p2p4(c5_plus({5: [1, 4]}))
    assert info.value.witness["module"] == [0, 5]
    with pytest.raises(ClaimViolation):
        decompose_p2p4(Graph.from_edges(range(4), [(0, 1), (1, 2), (2, 3)]))
    with pytest.raises(ValueError):
        decompose(cycle(5), ClassSpec(name="other", forbidden=()))


def test_tampered_reports_are_caught():
    G = c5_with_pendant()
    report = decompose_p1p5(G)
    moved = replace(report, edit_log=EditLog("0" * 64, report.edit_log.ops))
    assert any("different input graph" in p for p in report_problems(G, moved))
    tight = replace(report, budget={**P1P5_BUDGET, "bipartite_complementations": 0})
    assert any(p.startswith("bipartite_complementations") for p in report_problems(G, tight))
    dropped = replace(report, edit_log=EditLog(G.digest(), report.edit_log.ops[:-1]))
    assert not check_report(G, dropped)


def test_report_json():
    data = decompose_p1p5(c5_with_pendant()).to_json()
    assert data["class"] == P1P5.name
    assert data["edit_log"]["counts"]["deletions"] == 5
    assert data["context"]["W"][0] == [5]
    assert data["components"][0]["certificate"] == [[5], [], []]


def assert_sound(G: Graph, report, budget: dict[str, int]):
    assert report_problems(G, report) == []
    for key, limit in budget.items():
        assert report.used[key] <= limit
    for c in report.components:
        if c.kind != "three_uniform":
            assert rainbow_violation(c.graph, c.certificate) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=5, max_value=11))
def test_generated_p1p5_graphs_decompose(seed, n):
    G = gen_with_c5(P1P5, n, seed)
    assert_sound(G, decompose(G, P1P5), P1P5_BUDGET)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=5, max_value=11))
def test_generated_p2p4_graphs_decompose(seed, n):
    G = gen_with_c5(P2P4, n, seed)
    assert is_prime(G)
    assert find_induced_cycle(G, 5) is not None
    assert_sound(G, decompose(G, P2P4), P2P4_BUDGET)


def test_star_sets_form_a_three_uniform_component():
    G = c5_with_uniform_star()
    report = decompose_p2p4(G)
    (comp,) = report.components
    assert comp.kind == "three_uniform"
    assert isinstance(comp.certificate, UniformEmbedding)
    assert comp.certificate.copies == ((5, 7, 9), (6, 8, 10))
    assert report.used["deletions"] == 5
    assert report.used["bipartite_complementations"] == 2
    assert report.used["three_uniform"] == 1
    assert check_report(G, report)
