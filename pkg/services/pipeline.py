from __future__ import annotations

import logging
import os
from collections.abc import Hashable
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any

from dotenv import load_dotenv

from models.classes import ClassSpec
from models.decomposition import DecompositionReport
from models.errors import ClaimViolation, ExpressionError, MembershipError
from models.expr import Create, CwExpr, Join, Relabel, Union
from models.graph import BipartiteComplementation, Graph, ModuleNode, Vertex, vsorted
from models.partition import TriPartition
from models.trace import LeafRecord, PipelineResult, PipelineTrace, PrimeCase, PrimeCaseKind
from models.uniform import UniformEmbedding
from services.c5_decomp import decompose
from services.curious import curious_cw, curious_type, curious_width_bound
from services.cwx import (
    complete_expression,
    edgeless_expression,
    expr_to_json,
    linear_expression,
    rebuild_with_colours,
    substitute,
    union_all,
    verify,
    width,
)
from services.graph_ops import bipartition, modular_decomposition
from services.oracle import CliqueWidthOracle
from services.patterns import Witness, find_induced_cycle, is_free
from services.uniform import uniform_cw_expr

load_dotenv()

logger = logging.getLogger(__name__)


def membership(G: Graph, cls: ClassSpec) -> tuple[bool, Witness | None]:
    return is_free(G, cls.forbidden)


def cycle_expression(order: list[Vertex]) -> CwExpr:
    """Width-4 expression of the cycle through `order` (at least three vertices)."""
    if len(order) < 3:
        raise ExpressionError(f"a cycle needs at least three vertices, got {len(order)}")
    e: CwExpr = Join(1, 2, Union(Create(1, order[0]), Create(2, order[1])))
    for v in order[2:]:
        e = Relabel(4, 2, Relabel(2, 3, Join(2, 4, Union(e, Create(4, v)))))
    return Join(1, 2, e)


def result_to_json(result: PipelineResult) -> dict[str, Any]:
    return {
        "width": result.width,
        "bound": result.bound,
        "expr": expr_to_json(result.expr),
        "trace": result.trace.to_json(),
    }


class _Leaves:
    """Bipartite leaf builder for one prime quotient; keeps a record of every leaf."""

    def __init__(self, oracle: CliqueWidthOracle):
        self.logger = logging.getLogger(__name__)
        self.oracle = oracle
        self.records: list[LeafRecord] = []

    def __call__(self, G: Graph) -> CwExpr:
        vs = tuple(vsorted(G.vertices))
        if G.n <= self.oracle.cap:
            found = self.oracle.exact_expression(G, max(G.n, 1))
            if found is not None:
                self.records.append(LeafRecord(vs, "oracle", width(found)))
                return found
        e = linear_expression(G)
        self.logger.warning(
            f"bipartite leaf on {G.n} vertices is above the oracle cap {self.oracle.cap}; "
            f"using one label per vertex"
        )
        self.records.append(LeafRecord(vs, "fallback", width(e), unbounded_leaf=True))
        return e

    def since(self, start: int) -> int:
        return max((r.width for r in self.records[start:]), default=1)


class CliqueWidthBuilder:
    """
    Clique-width expressions for members of the two triangle-free classes.

    The input is split by its modular decomposition; every prime quotient is
    either the C7, decomposed around an induced C5, or bipartite, and its
    expression is put back into the tree with `substitute`.
    """

    def __init__(self, oracle: CliqueWidthOracle | None = None, max_workers: int | None = None):
        self.logger = logging.getLogger(__name__)
        self.oracle = oracle if oracle is not None else CliqueWidthOracle()
        self.max_workers = (
            max_workers
            if max_workers is not None
            else int(os.getenv("TRIFREE_CW_MAX_WORKERS", "4"))
        )

    def build(self, G: Graph, cls: ClassSpec) -> PipelineResult:
        ok, witness = membership(G, cls)
        if not ok:
            raise MembershipError(cls.name, witness)
        if G.n == 0:
            raise ExpressionError("the empty graph has no expression")
        tree = modular_decomposition(G)
        primes = [node for node in tree.iter_nodes() if node.kind == "prime"]
        self.logger.info(
            f"building expression for {G.n}-vertex graph in class {cls.name}: "
            f"{len(primes)} prime quotients"
        )

        results: dict[int, tuple[CwExpr, PrimeCase]] = {}
        with ThreadPoolExecutor(max_workers=max(1, self.max_workers)) as executor:
            futures = {
                executor.submit(self.prime_case, node.quotient, cls, index): index
                for index, node in enumerate(primes)
                if node.quotient is not None
            }
            for future in as_completed(futures):
                index = futures[future]
                results[index] = future.result()
                self.logger.debug(f"prime quotient {index} done: {results[index][1].case}")

        by_node = {id(node): results[index] for index, node in enumerate(primes)}
        expr, bound = self._assemble(tree, by_node)
        if not verify(expr, G):
            raise ClaimViolation("the built expression evaluates to the input graph", stage="build")
        trace = PipelineTrace(tree=tree, primes=tuple(results[i][1] for i in range(len(primes))))
        if trace.unbounded_leaf:
            self.logger.warning("expression contains leaves built without the oracle")
        w = width(expr)
        self.logger.info(f"expression of width {w} (composed bound {bound})")
        return PipelineResult(expr=expr, width=w, bound=max(bound, w), trace=trace)

    def _assemble(
        self, node: ModuleNode, by_node: dict[int, tuple[CwExpr, PrimeCase]]
    ) -> tuple[CwExpr, int]:
        if node.kind == "leaf":
            return Create(1, node.representative), 1
        assert node.quotient is not None
        parts: dict[Vertex, CwExpr] = {}
        bound = 1
        for child in node.children:
            sub, child_bound = self._assemble(child, by_node)
            parts[child.representative] = sub
            bound = max(bound, child_bound)
        if node.kind == "parallel":
            quotient_expr = edgeless_expression(node.quotient.vertices)
        elif node.kind == "series":
            quotient_expr = complete_expression(node.quotient.vertices)
            bound = max(bound, 2)
        else:
            quotient_expr, case = by_node[id(node)]
            bound = max(bound, case.bound)
        return substitute(quotient_expr, parts), bound

    def prime_case(self, H: Graph, cls: ClassSpec, index: int) -> tuple[CwExpr, PrimeCase]:
        vs = tuple(vsorted(H.vertices))
        leaves = _Leaves(self.oracle)
        report: DecompositionReport | None = None
        colours = 1
        kind: PrimeCaseKind
        # C7 and C5 can occur together; the C7 shortcut only holds without a C5
        c5 = find_induced_cycle(H, 5) if H.n >= 5 else None
        c7 = find_induced_cycle(H, 7) if c5 is None and H.n >= 7 else None
        if c5 is not None:
            kind = "C5"
            report = decompose(H, cls)
            expr, bound, colours = self._stitch(H, report, leaves)
        elif c7 is not None:
            if H.n != 7:
                extra = vsorted(set(H.vertices) - set(c7.vertices))
                raise ClaimViolation(
                    "a C5-free prime graph of the class with an induced C7 is that C7",
                    stage="prime case",
                    witness={"C7": list(c7.vertices), "extra": extra[:1]},
                )
            kind = "C7"
            expr = cycle_expression([c7.vertex_map[i] for i in range(7)])
            bound = 4
        else:
            if bipartition(H) is None:
                raise ClaimViolation(
                    "a prime graph of the class without C5 or C7 is bipartite",
                    stage="prime case",
                    witness={"vertices": list(vs)},
                )
            kind = "bipartite"
            expr = leaves(H)
            bound = width(expr)

        structural = width(expr)
        if kind != "bipartite" and H.n <= self.oracle.cap:
            exact = self.oracle.exact_expression(H, structural - 1) if structural > 1 else None
            if exact is not None:
                self.logger.debug(
                    f"oracle improves prime quotient {index} from {structural} to {width(exact)}"
                )
                expr = exact
        case = PrimeCase(
            index=index,
            vertices=vs,
            case=kind,
            width=width(expr),
            structural_width=structural,
            bound=max(bound, structural),
            leaves=tuple(leaves.records),
            report=report,
            colours=colours,
        )
        self.logger.info(
            f"prime quotient {index} on {H.n} vertices: {kind} case, width {case.width}"
        )
        return expr, case

    def _stitch(
        self, H: Graph, report: DecompositionReport, leaves: _Leaves
    ) -> tuple[CwExpr, int, int]:
        """
        Expression for H from expressions of the decomposition's components.

        The components and the deleted vertices are united without joins; each
        surviving vertex is then coloured by the complementation sides it lies
        on and by its deleted neighbours, every deleted vertex by itself, and
        the union tree is rebuilt against H with labels refined by colour.

        The returned bound is that of the rebuild, 2 * component labels * colours.
        """
        parts: list[CwExpr] = []
        inner_bound = 1
        for c in report.components:
            start = len(leaves.records)
            if c.kind == "three_uniform":
                assert isinstance(c.certificate, UniformEmbedding)
                e = uniform_cw_expr(c.certificate.spec, c.certificate.copies)
                leaves.records.append(
                    LeafRecord(tuple(vsorted(c.graph.vertices)), "uniform", width(e))
                )
                inner_bound = max(inner_bound, 2 * c.certificate.spec.k)
            else:
                assert isinstance(c.certificate, TriPartition)
                P = c.certificate
                e = curious_cw(c.graph, P, leaves)
                b = leaves.since(start)
                if all(P.parts):
                    inner_bound = max(inner_bound, curious_width_bound(b, curious_type(c.graph, P)))
                else:
                    inner_bound = max(inner_bound, b)
            parts.append(e)
        kept = set().union(*(c.graph.vertices for c in report.components))
        deleted = [v for v in H.vertices if v not in kept]
        parts.extend(Create(1, v) for v in deleted)
        combined = union_all(parts)

        complementations = [
            op for op in report.edit_log.ops if isinstance(op, BipartiteComplementation)
        ]
        colour: dict[Vertex, Hashable] = {}
        for v in H.vertices:
            if v not in kept:
                colour[v] = ("deleted", v)
                continue
            sides = tuple(0 if v in op.s else 1 if v in op.t else 2 for op in complementations)
            seen = H.neighbours(v)
            colour[v] = (sides, tuple(d in seen for d in deleted))
        colours = len(set(colour.values()))
        expr = rebuild_with_colours(combined, H, colour)
        self.logger.debug(
            f"stitched {len(report.components)} components and {len(deleted)} deleted "
            f"vertices with {colours} colours"
        )
        labels = max(inner_bound, width(combined))
        return expr, 2 * labels * colours, colours


def build_cw(G: Graph, cls: ClassSpec, oracle_cap: int | None = None) -> PipelineResult:
    return CliqueWidthBuilder(CliqueWidthOracle(cap=oracle_cap)).build(G, cls)
