from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from logging_config import level_from_env, setup_logging
from models.classes import class_by_name
from models.errors import ClaimViolation, MembershipError, TrifreeError
from models.graph import Graph
from models.partition import TriPartition
from models.poset import LabelledGraphW, Poset
from models.uniform import UniformSpec
from services.c5_decomp import decompose
from services.curious import curious_type, slice_type01, slice_type23
from services.cwx import expr_from_json, parse_term, to_term, verify, width
from services.generators import (
    enumerate_small,
    gen_class_random,
    gen_cycle,
    gen_uniform,
    gen_with_c5,
)
from services.graph_io import graph_to_graph6, graph_to_json, read_graph
from services.oracle import DEFAULT_CACHE_DIR, CliqueWidthOracle
from services.pipeline import CliqueWidthBuilder, membership, result_to_json
from services.uniform import special_3uniform_spec
from services.wqo import find_labelled_embedding

load_dotenv()

logger = logging.getLogger(__name__)


def _emit(payload: Any, out: str | None = None) -> None:
    text = json.dumps(payload, indent=2, default=str)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        print(f"Wrote {out}", file=sys.stderr)
    else:
        print(text)


def _oracle(cap: int | None, no_cache: bool) -> CliqueWidthOracle:
    use_cache = not no_cache and os.getenv("TRIFREE_CW_CACHE", "1") != "0"
    return CliqueWidthOracle(cap=cap, cache_dir=DEFAULT_CACHE_DIR if use_cache else None)


def run_check(graph_file: str, class_name: str) -> int:
    G = read_graph(graph_file)
    cls = class_by_name(class_name)
    ok, witness = membership(G, cls)
    if not ok:
        raise MembershipError(cls.name, witness)
    _emit({"class": cls.name, "member": True, "n": G.n})
    return 0


def run_decompose(
    graph_file: str, class_name: str, *, emit_json: str | None, emit_slices: bool
) -> int:
    G = read_graph(graph_file)
    cls = class_by_name(class_name)
    report = decompose(G, cls)
    payload = report.to_json()
    if emit_slices:
        slices = []
        for index, c in enumerate(report.components):
            P = c.certificate
            if not isinstance(P, TriPartition) or not all(P.parts):
                continue
            t = curious_type(c.graph, P)
            D = slice_type01(c.graph, P) if t <= 1 else slice_type23(c.graph, P)
            slices.append({"component": index, "type": t, "slices": D.to_json()})
        payload["slices"] = slices
    used = ", ".join(f"{k} {v}/{report.budget[k]}" for k, v in report.used.items())
    print(f"{len(report.components)} components; used {used}", file=sys.stderr)
    _emit(payload, emit_json)
    return 0


def run_cw_build(
    graph_file: str,
    class_name: str,
    *,
    oracle_cap: int | None,
    no_cache: bool,
    out: str | None,
    emit_json: bool,
) -> int:
    G = read_graph(graph_file)
    cls = class_by_name(class_name)
    result = CliqueWidthBuilder(_oracle(oracle_cap, no_cache)).build(G, cls)
    print(f"width {result.width} (bound {result.bound})", file=sys.stderr)
    if emit_json:
        _emit(result_to_json(result), out)
    elif out:
        Path(out).write_text(to_term(result.expr) + "\n", encoding="utf-8")
    else:
        print(to_term(result.expr))
    return 0


def _read_expr(path: str):
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("{"):
        return expr_from_json(json.loads(text))
    return parse_term(text)


def run_cw_verify(expr_file: str, graph_file: str) -> int:
    e = _read_expr(expr_file)
    G = read_graph(graph_file)
    if not verify(e, G):
        raise ClaimViolation(
            "the expression evaluates to the graph", stage="cw-verify", witness={"n": G.n}
        )
    _emit({"verified": True, "width": width(e)})
    return 0


def run_oracle(graph_file: str, *, kmax: int, oracle_cap: int | None, no_cache: bool) -> int:
    G = read_graph(graph_file)
    found = _oracle(oracle_cap, no_cache).exact_expression(G, kmax)
    if found is None:
        _emit({"cw": None, "above": kmax})
    else:
        _emit({"cw": width(found), "expr": to_term(found)})
    return 0


def run_gen(
    kind: str,
    *,
    class_name: str,
    n: int,
    p: float,
    seed: int,
    spec_file: str | None,
    m: int,
    fmt: str,
    out: str | None,
) -> int:
    graphs: list[Graph]
    if kind == "random":
        graphs = [gen_class_random(class_by_name(class_name or "p2p4"), n, p, seed)]
    elif kind == "c5":
        graphs = [gen_with_c5(class_by_name(class_name or "p2p4"), n, seed)]
    elif kind == "enumerate":
        graphs = list(enumerate_small(n, class_by_name(class_name) if class_name else None))
    elif kind == "uniform":
        if spec_file:
            spec = UniformSpec.from_json(json.loads(Path(spec_file).read_text("utf-8")))
        else:
            spec = special_3uniform_spec(m)
        graphs = [gen_uniform(spec)]
    else:
        graphs = [gen_cycle(n)]
    if fmt == "graph6":
        lines = [graph_to_graph6(G) for G in graphs]
    else:
        lines = [json.dumps(graph_to_json(G)) for G in graphs]
    text = "\n".join(lines)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        print(f"Wrote {len(graphs)} graphs to {out}", file=sys.stderr)
    elif text:
        print(text)
    return 0


def _labelled(path: str, default: Any) -> LabelledGraphW:
    G = read_graph(path)
    labels = [default] * G.n
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("{"):
        raw = json.loads(text).get("labels")
        if raw is not None:
            labels = [tuple(x) if isinstance(x, list) else x for x in raw]
    if len(labels) != G.n:
        raise ValueError(f"{path}: expected {G.n} labels, got {len(labels)}")
    return LabelledGraphW(G, dict(zip(G.vertices, labels, strict=True)))


def run_embed(small_file: str, big_file: str, poset_file: str | None) -> int:
    if poset_file:
        P = Poset.from_json(json.loads(Path(poset_file).read_text("utf-8")))
    else:
        P = Poset.antichain(1)
    default = P.elements[0]
    found = find_labelled_embedding(_labelled(small_file, default), _labelled(big_file, default), P)
    _emit({"embeds": found is not None, "map": None if found is None else list(found.items())})
    return 0


def _guarded(run: Callable[[], int]) -> int:
    try:
        return run()
    except MembershipError as e:
        _emit({"class": e.class_name, "member": False, "witness": e.witness.to_json()})
        return 2
    except ClaimViolation as e:
        logger.error(str(e))
        _emit(e.to_json())
        return 3
    except (TrifreeError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Clique-width expressions for (K3,P2+P4)-free and (K3,P1+P5)-free graphs"
    )
    parser.add_argument("--verbose", action="store_true", help="Enable DEBUG logging")
    parser.add_argument(
        "--log-file",
        help="Path to log file (logs are also written to stderr)",
        default=None,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_class(p: argparse.ArgumentParser, required: bool = True) -> None:
        p.add_argument(
            "--class",
            dest="class_name",
            required=required,
            default="" if not required else None,
            help='Graph class, "p2p4" or "p1p5" (or the full names)',
        )

    p = sub.add_parser("check", help="Test class membership")
    p.add_argument("graph")
    graph_class(p)

    p = sub.add_parser("decompose", help="Decompose a graph around an induced C5")
    p.add_argument("graph")
    graph_class(p)
    p.add_argument("--emit-json", help="Write the report to this file instead of stdout")
    p.add_argument(
        "--emit-slices", action="store_true", help="Add the slicing of each curious component"
    )

    p = sub.add_parser("cw-build", help="Build a clique-width expression")
    p.add_argument("graph")
    graph_class(p)
    p.add_argument("--oracle-cap", type=int, default=None)
    p.add_argument("--no-cache", action="store_true", help="Do not persist oracle results")
    p.add_argument("--out", help="Write the expression here")
    p.add_argument("--emit-json", action="store_true", help="Emit expression and trace as JSON")

    p = sub.add_parser("cw-verify", help="Check that an expression evaluates to a graph")
    p.add_argument("expr")
    p.add_argument("graph")

    p = sub.add_parser("oracle", help="Exact clique-width of a small graph")
    p.add_argument("graph")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--oracle-cap", type=int, default=None)
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("gen", help="Generate graphs")
    p.add_argument("kind", choices=["random", "c5", "enumerate", "uniform", "cycle"])
    graph_class(p, required=False)
    p.add_argument("-n", type=int, default=8)
    p.add_argument("-p", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", dest="spec_file", help="UniformSpec JSON for `gen uniform`")
    p.add_argument("-m", type=int, default=3, help="Copies of the special 3-uniform graph")
    p.add_argument("--format", dest="fmt", choices=["graph6", "json"], default="graph6")
    p.add_argument("--out")

    p = sub.add_parser("embed", help="Labelled induced embedding of one graph in another")
    p.add_argument("small")
    p.add_argument("big")
    p.add_argument("--poset", help="Poset JSON ({elements, covers}) for the labels")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else level_from_env()
    setup_logging(level, log_file=args.log_file)

    commands: dict[str, Callable[[], int]] = {
        "check": lambda: run_check(args.graph, args.class_name),
        "decompose": lambda: run_decompose(
            args.graph, args.class_name, emit_json=args.emit_json, emit_slices=args.emit_slices
        ),
        "cw-build": lambda: run_cw_build(
            args.graph,
            args.class_name,
            oracle_cap=args.oracle_cap,
            no_cache=args.no_cache,
            out=args.out,
            emit_json=args.emit_json,
        ),
        "cw-verify": lambda: run_cw_verify(args.expr, args.graph),
        "oracle": lambda: run_oracle(
            args.graph, kmax=args.kmax, oracle_cap=args.oracle_cap, no_cache=args.no_cache
        ),
        "gen": lambda: run_gen(
            args.kind,
            class_name=args.class_name,
            n=args.n,
            p=args.p,
            seed=args.seed,
            spec_file=args.spec_file,
            m=args.m,
            fmt=args.fmt,
            out=args.out,
        ),
        "embed": lambda: run_embed(args.small, args.big, args.poset),
    }
    return _guarded(commands[args.command])


if __name__ == "__main__":
    sys.exit(main())
