from __future__ import annotations

import pytest
from hypothesis import given, settings

from models.errors import OracleCapError
from models.graph import Graph
from services.cwx import verify, width
from services.oracle import HARD_CAP, CliqueWidthOracle
from services.patterns import find_induced
from scripts.strategies import cycle, graphs, path


@pytest.fixture
def oracle():
    return CliqueWidthOracle(cap=10)


def test_known_small_values(oracle):
    assert oracle.exact_cw(Graph({0: ()}), 3) == 1
    assert oracle.exact_cw(Graph.from_edges(range(4), []), 3) == 1
    assert oracle.exact_cw(path(2), 3) == 2
    assert oracle.exact_cw(cycle(4), 3) == 2
    assert oracle.exact_cw(path(4), 3) == 3
    assert oracle.exact_cw(cycle(5), 3) == 3
    assert oracle.exact_cw(cycle(6), 3) == 3


def test_c7_needs_four_labels(oracle):
    assert oracle.exact_cw(cycle(7), 3) is None
    e = oracle.exact_expression(cycle(7), 4)
    assert e is not None
    assert width(e) == 4
    assert verify(e, cycle(7))


def test_bound_below_answer_gives_none(oracle):
    assert oracle.exact_cw(path(4), 2) is None
    assert oracle.exact_cw(path(2), 1) is None
    assert oracle.exact_expression(Graph.empty(), 3) is None


def test_cap_is_enforced():
    with pytest.raises(OracleCapError):
        CliqueWidthOracle(cap=HARD_CAP + 1)
    with pytest.raises(OracleCapError):
        CliqueWidthOracle(cap=4).exact_cw(cycle(5), 3)


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("TRIFREE_CW_ORACLE_CAP", "7")
    assert CliqueWidthOracle().cap == 7


@settings(max_examples=40, deadline=None)
@given(graphs(min_n=1, max_n=6))
def test_expression_is_valid_and_within_bound(G):
    e = CliqueWidthOracle(cap=6).exact_expression(G, G.n)
    assert e is not None
    assert verify(e, G)
    assert width(e) <= max(G.n, 1)


@settings(max_examples=40, deadline=None)
@given(graphs(min_n=1, max_n=7))
def test_width_two_means_p4_free(G):
    found = CliqueWidthOracle(cap=7).exact_cw(G, 2)
    assert (found is not None) == (find_induced(G, "P4") is None)


def test_cache_persists_prime_results(tmp_path):
    first = CliqueWidthOracle(cap=8, cache_dir=tmp_path)
    assert first.exact_cw(cycle(6), 4) == 3
    assert (tmp_path / "oracle_cache.json").exists()
    second = CliqueWidthOracle(cap=8, cache_dir=tmp_path)
    assert second.exact_cw(cycle(6), 4) == 3
    assert second.exact_cw(cycle(6), 2) is None
