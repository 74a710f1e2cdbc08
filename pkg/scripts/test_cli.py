from __future__ import annotations

import json
import logging

import pytest

from logging_config import level_from_env
from main import main
from models.graph import Graph
from services.graph_io import graph_from_json, graph_to_json, write_graph
from scripts.strategies import c5_with_pendant, cycle, path


@pytest.fixture
def graph_file(tmp_path):
    def write(G: Graph, name: str = "g.json", **extra) -> str:
        path_ = tmp_path / name
        path_.write_text(json.dumps({**graph_to_json(G), **extra}), encoding="utf-8")
        return str(path_)

    return write


def stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_check_member(graph_file, capsys):
    assert main(["check", graph_file(cycle(5)), "--class", "p2p4"]) == 0
    assert stdout_json(capsys) == {"class": "K3,P2+P4", "member": True, "n": 5}


def test_check_reports_witness(graph_file, capsys):
    assert main(["check", graph_file(cycle(3)), "--class", "p1p5"]) == 2
    out = stdout_json(capsys)
    assert out["member"] is False
    assert out["witness"]["pattern"] == "K3"


def test_decompose_with_slices(graph_file, tmp_path, capsys):
    report = tmp_path / "report.json"
    args = ["decompose", graph_file(c5_with_pendant()), "--class", "p1p5"]
    assert main(args + ["--emit-json", str(report), "--emit-slices"]) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["used"]["bipartite_complementations"] == 1
    assert data["slices"] == []
    assert "components" in capsys.readouterr().err


def test_build_then_verify(graph_file, tmp_path, capsys):
    g = graph_file(cycle(5))
    expr = tmp_path / "expr.txt"
    args = ["cw-build", g, "--class", "p2p4", "--oracle-cap", "6", "--no-cache"]
    assert main(args + ["--out", str(expr)]) == 0
    capsys.readouterr()
    assert main(["cw-verify", str(expr), g]) == 0
    assert stdout_json(capsys) == {"verified": True, "width": 3}
    assert main(["cw-verify", str(expr), graph_file(path(5), "p5.json")]) == 3
    assert stdout_json(capsys)["stage"] == "cw-verify"


def test_build_json(graph_file, capsys):
    args = ["cw-build", graph_file(cycle(7)), "--class", "p1p5", "--no-cache", "--emit-json"]
    assert main(args) == 0
    out = stdout_json(capsys)
    assert out["width"] == 4
    assert out["trace"]["primes"][0]["case"] == "C7"


def test_oracle_command(graph_file, capsys):
    g = graph_file(cycle(5))
    assert main(["oracle", g, "--kmax", "2", "--no-cache"]) == 0
    assert stdout_json(capsys) == {"cw": None, "above": 2}
    assert main(["oracle", g, "--kmax", "4", "--no-cache"]) == 0
    assert stdout_json(capsys)["cw"] == 3


def test_gen_cycle_json(capsys):
    assert main(["gen", "cycle", "-n", "6", "--format", "json"]) == 0
    assert graph_from_json(json.loads(capsys.readouterr().out)) == cycle(6)


def test_gen_enumerate_to_file(tmp_path, capsys):
    out = tmp_path / "members.g6"
    assert main(["gen", "enumerate", "-n", "4", "--class", "p2p4", "--out", str(out)]) == 0
    assert len(out.read_text(encoding="utf-8").split()) == 7


def test_embed(graph_file, tmp_path, capsys):
    small = graph_file(path(2), "small.json", labels=[1, 0])
    big = graph_file(path(3), "big.json", labels=[1, 1, 0])
    # label 1 is outside the default one-element poset
    assert main(["embed", small, big]) == 1
    poset = tmp_path / "chain.json"
    poset.write_text(json.dumps({"elements": [0, 1], "covers": [[0, 1]]}), encoding="utf-8")
    assert main(["embed", small, big, "--poset", str(poset)]) == 0
    assert stdout_json(capsys)["embeds"] is True


def test_bad_input_exits_one(graph_file, tmp_path, capsys):
    assert main(["check", str(tmp_path / "missing.json"), "--class", "p2p4"]) == 1
    assert main(["check", graph_file(cycle(5)), "--class", "k4"]) == 1
    write_graph(cycle(5), tmp_path / "c5.g6", fmt="graph6")
    assert main(["check", str(tmp_path / "c5.g6"), "--class", "p1p5"]) == 0


def test_log_level_from_environment(monkeypatch):
    monkeypatch.setenv("TRIFREE_CW_LOG_LEVEL", "debug")
    assert level_from_env() == logging.DEBUG
    monkeypatch.setenv("TRIFREE_CW_LOG_LEVEL", "chatty")
    assert level_from_env() == logging.WARNING
