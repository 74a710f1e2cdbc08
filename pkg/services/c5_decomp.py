from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence

from models.classes import P1P5, P2P4, ClassSpec
from models.decomposition import (
    C5Context,
    Component,
    ComponentKind,
    DecompositionReport,
    StageRecord,
)
from models.errors import ClaimViolation, MembershipError, PartitionError
from models.graph import (
    BipartiteComplementation,
    EditLog,
    EditOp,
    Graph,
    Vertex,
    VertexDeletion,
    vsorted,
)
from models.partition import TriPartition
from models.uniform import UniformEmbedding
from services.cwx import verify
from services.graph_ops import (
    apply_edit,
    bipartition,
    connected_components,
    disjoint_union,
    find_nontrivial_module,
    induced_subgraph,
    replay,
)
from services.patterns import Witness, find_induced_cycle, is_free, rainbow_violation
from services.uniform import recognize_3uniform_special, uniform_cw_expr

logger = logging.getLogger(__name__)

P1P5_BUDGET = {"deletions": 5, "bipartite_complementations": 31, "curious": 11, "three_uniform": 0}
P2P4_BUDGET = {
    "deletions": 2570,
    "bipartite_complementations": 459,
    "curious": 19,
    "three_uniform": 1,
}
MODULE_BOUND = 512

EMPTY: frozenset[Vertex] = frozenset()

Certificate = TriPartition | UniformEmbedding


def _cycle_order(cycle: Witness | Sequence[Vertex]) -> tuple[Vertex, ...]:
    if isinstance(cycle, Witness):
        return tuple(cycle.vertex_map[i] for i in range(5))
    return tuple(cycle)


def orientations(cycle: Sequence[Vertex]) -> list[tuple[Vertex, ...]]:
    """The ten rotations and reflections of a 5-cycle, starting with the cycle as given."""
    c = list(cycle)
    out = []
    for seq in (c, c[:1] + c[:0:-1]):
        for r in range(5):
            out.append(tuple(seq[r:] + seq[:r]))
    return out


def partition_around_c5(G: Graph, cycle: Witness | Sequence[Vertex]) -> C5Context:
    order = _cycle_order(cycle)
    if len(order) != 5 or len(set(order)) != 5:
        raise ValueError(f"a C5 needs five distinct vertices, got {list(order)}")
    G.require(order)
    for i in range(5):
        for j in range(i + 1, 5):
            if G.has_edge(order[i], order[j]) != ((j - i) % 5 in (1, 4)):
                raise ValueError(f"vertices {list(order)} do not induce a C5 in this order")
    on_cycle = set(order)
    U: set[Vertex] = set()
    W: list[set[Vertex]] = [set() for _ in range(5)]
    V: list[set[Vertex]] = [set() for _ in range(5)]
    for v in G.vertices:
        if v in on_cycle:
            continue
        nb = G.neighbours(v)
        hits = [i for i in range(5) if order[i] in nb]
        for a in hits:
            if (a + 1) % 5 in hits:
                raise ClaimViolation(
                    "no vertex sees two consecutive cycle vertices",
                    stage="partition_around_c5",
                    witness={"K3": [v, order[a], order[(a + 1) % 5]]},
                )
        if not hits:
            U.add(v)
        elif len(hits) == 1:
            W[hits[0]].add(v)
        else:
            a, b = hits
            # non-consecutive pair: the middle vertex is the one both skip
            middle = (a + 1) % 5 if (b - a) % 5 == 2 else (b + 1) % 5
            V[middle].add(v)
    return C5Context(
        cycle=order,
        U=frozenset(U),
        W=tuple(frozenset(w) for w in W),
        V=tuple(frozenset(v) for v in V),
    )


class _Editor:
    """Current graph of a decomposition run, with its edit log, stages and components."""

    def __init__(self, G: Graph, cls: ClassSpec, ctx: C5Context):
        self.logger = logging.getLogger(__name__)
        self.input = G
        self.graph = G
        self.cls = cls
        self.ctx = ctx
        self.ops: list[EditOp] = []
        self.stages: list[StageRecord] = []
        self.pieces: list[tuple[frozenset[Vertex], ComponentKind, Certificate]] = []
        self._stage = ""
        self._stage_ops: list[EditOp] = []

    def begin(self, name: str) -> None:
        self._stage = name
        self._stage_ops = []

    def end(self, note: str = "") -> None:
        ops = tuple(self._stage_ops)
        self.stages.append(StageRecord(self._stage, ops, skipped=not ops, note=note))
        if ops:
            self.logger.debug(f"stage {self._stage}: {len(ops)} ops")

    def skip(self, name: str, note: str) -> None:
        self.stages.append(StageRecord(name, (), skipped=True, note=note))

    def require(self, ok: bool, claim: str, **witness) -> None:
        if not ok:
            raise ClaimViolation(claim, stage=self._stage, witness=witness)

    def _apply(self, op: EditOp) -> None:
        self.graph = apply_edit(self.graph, op)
        self.ops.append(op)
        self._stage_ops.append(op)

    def complement(self, s: Iterable[Vertex], t: Iterable[Vertex]) -> None:
        s, t = frozenset(s), frozenset(t)
        if s and t:
            self._apply(BipartiteComplementation(s, t))

    def delete(self, vertices: Iterable[Vertex]) -> None:
        for v in vsorted(vertices):
            if v in self.graph:
                self._apply(VertexDeletion(v))

    def live(self, vertices: Iterable[Vertex]) -> frozenset[Vertex]:
        return frozenset(v for v in vertices if v in self.graph)

    def detach_uniform(self, part: Iterable[Vertex], inside: Iterable[Vertex]) -> None:
        """Cut `part` off everything outside `inside` with one complementation."""
        part = self.live(part)
        if not part:
            return
        inside = frozenset(inside)
        complete = []
        for v in self.graph.vertices:
            if v in inside:
                continue
            seen = self.graph.neighbours(v) & part
            if len(seen) == len(part):
                complete.append(v)
            elif seen:
                self.require(
                    False,
                    "every outside vertex is complete or anti-complete to the part",
                    vertex=v,
                    part=vsorted(part),
                )
        self.complement(part, complete)

    def detach_simple(
        self, inside: Sequence[frozenset[Vertex]], outside: Sequence[frozenset[Vertex]]
    ) -> None:
        """Cut the inside cells off the outside cells, one complementation per simple pair."""
        G = self.graph
        for a in inside:
            a = self.live(a)
            for b in outside:
                b = self.live(b)
                a_hit = frozenset(x for x in a if G.neighbours(x) & b)
                if not a_hit:
                    continue
                b_hit = frozenset(y for y in b if G.neighbours(y) & a)
                self.require(
                    G.is_complete_to(a_hit, b_hit),
                    "edges between the two sets form one complete bipartite graph",
                    sides=[vsorted(a_hit), vsorted(b_hit)],
                )
                self.complement(a_hit, b_hit)
                G = self.graph
        inner = frozenset().union(*inside)
        for x in self.live(inner):
            stray = G.neighbours(x) - inner
            self.require(not stray, "the set is separated", vertex=x, neighbours=vsorted(stray))

    def piece(
        self, vertices: Iterable[Vertex], kind: ComponentKind, certificate: Certificate | None
    ) -> None:
        vs = frozenset(vertices)
        if vs and certificate is not None:
            self.pieces.append((vs, kind, certificate))

    def finish(self, budget: dict[str, int]) -> DecompositionReport:
        covered = frozenset().union(*(p[0] for p in self.pieces))
        self.require(
            covered == frozenset(self.graph.vertices),
            "every remaining vertex lies in a component",
            remaining=vsorted(frozenset(self.graph.vertices) ^ covered),
        )
        components = tuple(
            Component(induced_subgraph(self.graph, vs), kind, cert)
            for vs, kind, cert in self.pieces
        )
        log = EditLog(input_graph_hash=self.input.digest(), ops=tuple(self.ops))
        used = _usage(log, components)
        report = DecompositionReport(
            class_name=self.cls.name,
            edit_log=log,
            components=components,
            budget=dict(budget),
            context=self.ctx,
            stages=tuple(self.stages),
            used=used,
        )
        problems = report_problems(self.input, report)
        if problems:
            raise ClaimViolation(
                "the decomposition replays to certified components within budget",
                stage="finish",
                witness={"problems": problems},
            )
        return report


def _check_independent(G: Graph, S: Iterable[Vertex], claim: str, stage: str) -> None:
    S = vsorted(S)
    for i, a in enumerate(S):
        for b in S[i + 1 :]:
            if G.has_edge(a, b):
                raise ClaimViolation(claim, stage=stage, witness={"edge": [a, b]})


def _split_v(
    G: Graph, V: Sequence[frozenset[Vertex]], stage: str
) -> tuple[list[frozenset[Vertex]], list[frozenset[Vertex]], list[frozenset[Vertex]]]:
    """V_i into V0 (dominates both neighbours), V- (only V_{i-1}) and V+ (only V_{i+1})."""
    V0, Vm, Vp = [], [], []
    for i in range(5):
        prev, nxt = V[(i - 1) % 5], V[(i + 1) % 5]
        z, m, p = set(), set(), set()
        for x in V[i]:
            nb = G.neighbours(x)
            dp, dn = prev <= nb, nxt <= nb
            if dp and dn:
                z.add(x)
            elif dp:
                m.add(x)
            elif dn:
                p.add(x)
            else:
                raise ClaimViolation(
                    f"every vertex of V{i + 1} dominates V{(i - 1) % 5 + 1} or V{(i + 1) % 5 + 1}",
                    stage=stage,
                    witness={"vertex": x},
                )
        V0.append(frozenset(z))
        Vm.append(frozenset(m))
        Vp.append(frozenset(p))
    return V0, Vm, Vp


def _split_w(
    G: Graph,
    W: Sequence[frozenset[Vertex]],
    V: Sequence[frozenset[Vertex]],
    V0: Sequence[frozenset[Vertex]],
    Vm: Sequence[frozenset[Vertex]],
    Vp: Sequence[frozenset[Vertex]],
    widened: bool,
    stage: str,
) -> tuple[list[frozenset[Vertex]], list[frozenset[Vertex]], list[frozenset[Vertex]]]:
    """
    W_i into W2 (neighbours in V0_{i+2}), W3 (neighbours in V0_{i+3}) and W0.
    With `widened` the anchors are V0_{i+2} ∪ V+_{i+2} and V0_{i+3} ∪ V-_{i+3}.
    """
    W0, W2, W3 = [], [], []
    for i in range(5):
        i2, i3 = (i + 2) % 5, (i + 3) % 5
        anchor2 = V0[i2] | (Vp[i2] if widened else EMPTY)
        anchor3 = V0[i3] | (Vm[i3] if widened else EMPTY)
        z, two, three = set(), set(), set()
        for x in W[i]:
            nb = G.neighbours(x)
            h2, h3 = bool(nb & anchor2), bool(nb & anchor3)
            if h2 and h3:
                raise ClaimViolation(
                    "no W vertex has neighbours on both anchor sets",
                    stage=stage,
                    witness={"vertex": x},
                )
            if h2:
                if nb & V[i3] or not Vm[i2] <= nb:
                    raise ClaimViolation(
                        f"a W2 vertex misses V{i3 + 1} and dominates V{i2 + 1}-",
                        stage=stage,
                        witness={"vertex": x},
                    )
                two.add(x)
            elif h3:
                if nb & V[i2] or not Vp[i3] <= nb:
                    raise ClaimViolation(
                        f"a W3 vertex misses V{i2 + 1} and dominates V{i3 + 1}+",
                        stage=stage,
                        witness={"vertex": x},
                    )
                three.add(x)
            else:
                z.add(x)
        W0.append(frozenset(z))
        W2.append(frozenset(two))
        W3.append(frozenset(three))
    return W0, W2, W3


def _p1p5_run(G: Graph, order: tuple[Vertex, ...]) -> DecompositionReport:
    ctx = partition_around_c5(G, order)
    ed = _Editor(G, P1P5, ctx)
    U, W, V = ctx.U, ctx.W, ctx.V
    for i in range(5):
        _check_independent(
            G,
            V[(i - 1) % 5] | W[i] | V[(i + 1) % 5],
            "V_{i-1} ∪ W_i ∪ V_{i+1} is independent",
            "setup",
        )

    if U:
        ed.begin("detach U")
        _check_independent(G, U, "U is an independent set", "detach U")
        ed.detach_uniform(U, U)
        ed.piece(U, "curious", TriPartition(U, EMPTY, EMPTY))
        ed.end()
    else:
        ed.skip("detach U", "U is empty")

    V0, Vm, Vp = _split_v(ed.graph, V, "split V")
    W0, W2, W3 = _split_w(ed.graph, W, V, V0, Vm, Vp, widened=False, stage="split W")

    for i in range(5):
        parts = (W0[i], Vp[(i - 2) % 5], Vm[(i + 2) % 5])
        name = f"detach W{i + 1}^0 ∪ V{(i - 2) % 5 + 1}^+ ∪ V{(i + 2) % 5 + 1}^-"
        _detach_parts(ed, name, parts, "curious")

    for i in range(5):
        parts = (W3[i], W2[(i + 1) % 5], V0[(i - 2) % 5])
        name = f"detach W{i + 1}^3 ∪ W{(i + 1) % 5 + 1}^2 ∪ V{(i - 2) % 5 + 1}^0"
        _detach_parts(ed, name, parts, "curious")

    ed.begin("delete cycle")
    ed.delete(ctx.cycle)
    ed.end()
    return ed.finish(P1P5_BUDGET)


def _detach_parts(
    ed: _Editor, name: str, parts: tuple[frozenset[Vertex], ...], kind: ComponentKind
) -> None:
    inside = frozenset().union(*parts)
    if not inside:
        ed.skip(name, "empty")
        return
    ed.begin(name)
    for part in parts:
        ed.detach_uniform(part, inside)
    ed.piece(inside, kind, TriPartition.of(parts))
    ed.end()


def _star_sets(G: Graph, ctx: C5Context) -> list[frozenset[Vertex]]:
    """V*_i: vertices of V_i with a neighbour in U, checked against the component structure."""
    U = ctx.U
    out = []
    for i in range(5):
        star = frozenset(x for x in ctx.V[i] if G.neighbours(x) & U)
        for x in vsorted(star):
            S = G.neighbours(x) & U
            for y in vsorted(star):
                if y == x:
                    continue
                Sy = G.neighbours(y) & U
                if Sy == S:
                    raise ClaimViolation(
                        "each component of G[U ∪ V*_i] has one V*_i vertex",
                        stage="star sets",
                        witness={"module": vsorted({x, y})},
                    )
                if Sy & S:
                    raise ClaimViolation(
                        "G[U ∪ V_i] is P4-free", stage="star sets", witness={"vertices": [x, y]}
                    )
            if len(star) > 1 and len(S) > 1:
                raise ClaimViolation(
                    "when |V*_i| > 1 each V*_i vertex has one U neighbour",
                    stage="star sets",
                    witness={"module": vsorted(S)},
                )
        out.append(star)
    for i in range(5):
        if len(out[i]) > 1 and len(out[(i + 2) % 5]) > 1:
            raise ClaimViolation(
                "no two V* sets two steps apart both have two vertices",
                stage="star sets",
                witness={"sets": [i + 1, (i + 2) % 5 + 1]},
            )
    return out


def _w_pairs(
    G: Graph, W: Sequence[frozenset[Vertex]]
) -> tuple[list[frozenset[Vertex]], list[frozenset[Vertex]], list[int]]:
    """W+_i, W-_i for the non-simple pairs {W_i, W_{i+2}}, and the indices i of those pairs."""
    plus = [EMPTY] * 5
    minus = [EMPTY] * 5
    nonsimple = []
    for i in range(5):
        j = (i + 2) % 5
        A, B = W[i], W[j]
        H = induced_subgraph(G, A | B)
        comps = [c for c in connected_components(H) if len(c) > 1]
        for c in comps:
            if not G.is_complete_to(c & A, c & B):
                raise ClaimViolation(
                    f"G[W{i + 1} ∪ W{j + 1}] is P4-free",
                    stage="W pairs",
                    witness={"component": vsorted(c)},
                )
        if len(comps) >= 2:
            nonsimple.append(i)
            plus[i] = frozenset(x for x in A if G.neighbours(x) & B)
            minus[j] = frozenset(y for y in B if G.neighbours(y) & A)
    if len(nonsimple) > 2:
        raise ClaimViolation(
            "at most two W pairs are non-simple",
            stage="W pairs",
            witness={"pairs": [i + 1 for i in nonsimple]},
        )
    for i in range(5):
        if plus[i] & minus[i]:
            raise ClaimViolation(
                "W+_i and W-_i are disjoint",
                stage="W pairs",
                witness={"vertices": vsorted(plus[i] & minus[i])},
            )
    return plus, minus, nonsimple


def _trim_v(ed: _Editor, V: list[frozenset[Vertex]]) -> None:
    """Delete the largest A^{x,y} from each V_i so every vertex dominates a neighbouring V."""
    for i in range(5):
        name = f"trim V{i + 1}"
        ed.begin(name)
        G = ed.graph
        cur, prev, nxt = ed.live(V[i]), ed.live(V[(i - 1) % 5]), ed.live(V[(i + 1) % 5])
        best: frozenset[Vertex] = EMPTY
        for x in vsorted(prev):
            nx_ = G.neighbours(x)
            for y in vsorted(nxt):
                A = frozenset(v for v in cur if v not in nx_ and v not in G.neighbours(y))
                if len(A) > len(best):
                    best = A
        ed.require(
            len(best) <= MODULE_BOUND,
            f"at most {MODULE_BOUND} vertices of a V set miss a pair of neighbours",
            size=len(best),
        )
        for v in cur - best:
            nb = G.neighbours(v)
            ed.require(
                prev <= nb or nxt <= nb,
                "after trimming, every V_i vertex dominates V_{i-1} or V_{i+1}",
                vertex=v,
            )
        ed.delete(best)
        ed.end(note=f"deleted {len(best)}")
        V[i] = cur - best


def _p2p4_run(G: Graph, order: tuple[Vertex, ...]) -> DecompositionReport:
    ctx = partition_around_c5(G, order)
    ed = _Editor(G, P2P4, ctx)
    U, W = ctx.U, ctx.W
    for i in range(5):
        _check_independent(G, U | W[i], "U ∪ W_i is independent", "setup")
        _check_independent(
            G,
            ctx.V[(i - 1) % 5] | W[i] | ctx.V[(i + 1) % 5],
            "V_{i-1} ∪ W_i ∪ V_{i+1} is independent",
            "setup",
        )
    star = _star_sets(G, ctx)
    all_star = frozenset().union(*star)
    lone = frozenset().union(*(s for s in star if len(s) == 1))
    plus, minus, nonsimple = _w_pairs(G, W)

    if U or all_star:
        ed.begin("detach U ∪ V*")
        inside = U | all_star
        for i in range(5):
            ed.detach_uniform(star[i], inside)
        for u in U:
            ed.require(ed.graph.neighbours(u) <= inside, "U has no neighbour outside V*", vertex=u)
        ed.end()
        ed.begin("delete V**")
        ed.delete(lone)
        ed.end(note=f"{len(lone)} singleton V* sets")
        _classify_star_component(ed, U, [s - lone for s in star])
    else:
        ed.skip("detach U ∪ V*", "U is empty")
        ed.skip("delete V**", "U is empty")

    if nonsimple:
        for i in nonsimple:
            j = (i + 2) % 5
            name = f"detach W{i + 1}^+ ∪ W{j + 1}^-"
            _detach_parts(ed, name, (plus[i], minus[j], EMPTY), "bipartite")
    else:
        ed.skip("detach W*", "every W pair is simple")

    ed.begin("delete cycle")
    ed.delete(ctx.cycle)
    ed.end()

    Wr = [W[i] - plus[i] - minus[i] for i in range(5)]
    Vr = [ctx.V[i] - star[i] for i in range(5)]
    _trim_v(ed, Vr)
    V0, Vm, Vp = _split_v(ed.graph, Vr, "split V")
    W0, W2, W3 = _split_w(ed.graph, Wr, Vr, V0, Vm, Vp, widened=True, stage="split W")

    cells: dict[tuple[str, int], frozenset[Vertex]] = {}
    for i in range(5):
        cells[("V0", i)], cells[("V-", i)], cells[("V+", i)] = V0[i], Vm[i], Vp[i]
        cells[("W0", i)], cells[("W2", i)], cells[("W3", i)] = W0[i], W2[i], W3[i]
    detached: set[tuple[str, int]] = set()

    def detach(name: str, keys: list[tuple[str, int]]) -> frozenset[Vertex]:
        inside = [cells[k] for k in keys]
        outside = [cells[k] for k in cells if k not in keys and k not in detached]
        ed.begin(name)
        ed.detach_simple(inside, outside)
        ed.end()
        detached.update(keys)
        return frozenset().union(*inside)

    first: list[list[tuple[str, int]] | None] = []
    for i in range(5):
        if W3[i] and W2[(i + 1) % 5]:
            first.append([("W3", i), ("W2", (i + 1) % 5), ("V0", (i + 3) % 5)])
        else:
            first.append(None)

    for i in range(5):
        keys = first[i]
        if keys is None:
            ed.skip(f"detach H1_{i + 1}", "empty")
            continue
        H = detach(f"detach H1_{i + 1}", keys)
        halves = bipartition(induced_subgraph(ed.graph, H))
        ed.require(
            halves is not None, "graphs of the first kind are bipartite", vertices=vsorted(H)
        )
        assert halves is not None
        ed.piece(H, "bipartite", TriPartition(halves[0], halves[1], EMPTY))

    for i in range(5):
        keys = [("W0", i), ("V-", (i + 2) % 5), ("V+", (i + 3) % 5)]
        took3 = first[(i - 1) % 5] is None and bool(W3[(i - 1) % 5])
        took2 = first[i] is None and bool(W2[(i + 1) % 5])
        if took3:
            keys += [("W3", (i - 1) % 5), ("V0", (i + 2) % 5)]
        if took2:
            keys += [("W2", (i + 1) % 5), ("V0", (i + 3) % 5)]
        if not any(cells[k] for k in keys):
            ed.skip(f"detach H2_{i + 1}", "empty")
            detached.update(keys)
            continue
        H = detach(f"detach H2_{i + 1}", keys)
        _split_second_kind(ed, i, H, cells, took3, took2)

    leftover = ed.live(ed.graph.vertices) - frozenset().union(*(p[0] for p in ed.pieces))
    ring = [ed.live(V0[i]) & leftover for i in range(5)]
    ed.begin("separate V0 ring")
    ed.require(
        leftover == frozenset().union(*ring), "only V0 sets remain", vertices=vsorted(leftover)
    )
    for i in range(5):
        a, b = ring[i], ring[(i + 1) % 5]
        if a and b:
            ed.require(ed.graph.is_complete_to(a, b), "V0_i is complete to V0_{i+1}", sets=[i + 1])
            ed.complement(a, b)
    ed.require(ed.graph.is_independent(leftover), "the ring is independent after separation")
    ed.piece(leftover, "curious", TriPartition(leftover, EMPTY, EMPTY))
    ed.end()
    return ed.finish(P2P4_BUDGET)


def _classify_star_component(
    ed: _Editor, U: frozenset[Vertex], star: list[frozenset[Vertex]]
) -> None:
    H = U | frozenset().union(*star)
    if not H:
        return
    ed.begin("classify U ∪ V*")
    big = [i for i in range(5) if star[i]]
    if len(big) <= 1:
        other = star[big[0]] if big else EMPTY
        ed.piece(H, "bipartite", TriPartition(U, other, EMPTY))
    else:
        ed.require(
            len(big) == 2, "at most two V* sets keep two vertices", sets=[i + 1 for i in big]
        )
        a, b = big
        if (b - a) % 5 == 1:
            first, second = a, b
        else:
            ed.require((a - b) % 5 == 1, "large V* sets are consecutive", sets=[a + 1, b + 1])
            first, second = b, a
        embedding = recognize_3uniform_special(
            induced_subgraph(ed.graph, H), (star[first], star[second], U)
        )
        ed.require(
            embedding is not None,
            "G[V*_i ∪ V*_{i+1} ∪ U] is 3-uniform",
            sets=[first + 1, second + 1],
        )
        ed.piece(H, "three_uniform", embedding)
    ed.end()


def _split_second_kind(
    ed: _Editor,
    i: int,
    H: frozenset[Vertex],
    cells: dict[tuple[str, int], frozenset[Vertex]],
    took3: bool,
    took2: bool,
) -> None:
    G = ed.graph
    i2, i3 = (i + 2) % 5, (i + 3) % 5
    w0 = cells[("W0", i)]
    vm, vp = cells[("V-", i2)], cells[("V+", i3)]
    w3 = cells[("W3", (i - 1) % 5)] if took3 else EMPTY
    w2 = cells[("W2", (i + 1) % 5)] if took2 else EMPTY
    v0_2 = cells[("V0", i2)] if took3 else EMPTY
    v0_3 = cells[("V0", i3)] if took2 else EMPTY
    name = f"split H2_{i + 1}"
    if not (took3 or took2):
        ed.piece(H, "curious", TriPartition(w0, vm, vp))
        return
    X = (w3 | v0_3 | vp) & H
    Y = (w2 | v0_2 | vm) & H
    if not w0:
        ed.piece(H, "bipartite", TriPartition(X, Y, EMPTY))
        return
    added = w3 | w2
    if G.is_complete_to(w0, added):
        ed.piece(H, "curious", TriPartition(X, Y, w0))
        return
    ed.begin(name)
    ed.require(
        G.is_anticomplete_to(w0, added),
        "W0_i is complete or anti-complete to W3_{i-1} ∪ W2_{i+1}",
        sets=[i + 1],
    )
    s3 = frozenset(x for x in w3 if G.neighbours(x) & w2)
    s2 = frozenset(y for y in w2 if G.neighbours(y) & w3)
    rest = H
    if s3 and s2:
        ed.require(
            G.is_complete_to(s3, s2), "W3* is complete to W2*", sides=[vsorted(s3), vsorted(s2)]
        )
        inside = s3 | s2
        ed.detach_uniform(s3, inside)
        ed.detach_uniform(s2, inside)
        ed.piece(inside, "bipartite", TriPartition(s3, s2, EMPTY))
        rest = H - inside
    ed.piece(
        rest,
        "curious",
        TriPartition((v0_3 | vp) & rest, (v0_2 | vm) & rest, (w0 | w3 | w2) & rest),
    )
    ed.end()


def _check_member(G: Graph, cls: ClassSpec) -> None:
    ok, witness = is_free(G, cls.forbidden)
    if not ok:
        raise MembershipError(cls.name, witness)


def _find_c5(G: Graph, stage: str) -> tuple[Vertex, ...]:
    w = find_induced_cycle(G, 5)
    if w is None:
        raise ClaimViolation("the graph contains an induced C5", stage=stage)
    return _cycle_order(w)


def _first_orientation(
    G: Graph,
    cycle: tuple[Vertex, ...],
    run: Callable[[Graph, tuple[Vertex, ...]], DecompositionReport],
) -> DecompositionReport:
    first: ClaimViolation | None = None
    for order in orientations(cycle):
        try:
            report = run(G, order)
        except ClaimViolation as e:
            logger.debug(f"cycle orientation {list(order)} failed: {e}")
            first = first or e
            continue
        logger.info(
            f"decomposed {G.n}-vertex graph around C5 {list(order)}: "
            f"{len(report.components)} components, used {report.used}"
        )
        return report
    assert first is not None
    raise first


def decompose_p1p5(G: Graph, cycle: Sequence[Vertex] | None = None) -> DecompositionReport:
    _check_member(G, P1P5)
    comps = connected_components(G)
    if len(comps) > 1:
        raise ClaimViolation(
            "the graph is connected",
            stage="decompose_p1p5",
            witness={"component": vsorted(comps[0])},
        )
    order = tuple(cycle) if cycle is not None else _find_c5(G, "decompose_p1p5")
    return _first_orientation(G, order, _p1p5_run)


def decompose_p2p4(G: Graph, cycle: Sequence[Vertex] | None = None) -> DecompositionReport:
    _check_member(G, P2P4)
    module = find_nontrivial_module(G)
    if module is not None:
        raise ClaimViolation(
            "the graph is prime", stage="decompose_p2p4", witness={"module": vsorted(module)}
        )
    order = tuple(cycle) if cycle is not None else _find_c5(G, "decompose_p2p4")
    return _first_orientation(G, order, _p2p4_run)


def decompose(G: Graph, cls: ClassSpec) -> DecompositionReport:
    if cls == P1P5:
        return decompose_p1p5(G)
    if cls == P2P4:
        return decompose_p2p4(G)
    raise ValueError(f"no C5 decomposition for class {cls.name}")


def _certificate_problems(c: Component, index: int) -> list[str]:
    where = f"component {index} ({c.kind})"
    if c.kind == "three_uniform":
        emb = c.certificate
        if not isinstance(emb, UniformEmbedding):
            return [f"{where}: certificate is not a uniform embedding"]
        slots = {v for copy in emb.copies for v in copy if v is not None}
        if slots != set(c.graph.vertices):
            return [f"{where}: embedding does not cover the component"]
        if not verify(uniform_cw_expr(emb.spec, emb.copies), c.graph):
            return [f"{where}: component is not the embedded uniform graph"]
        return []
    P = c.certificate
    if not isinstance(P, TriPartition):
        return [f"{where}: certificate is not a 3-partition"]
    try:
        found = rainbow_violation(c.graph, P)
    except PartitionError as e:
        return [f"{where}: {e}"]
    if found is not None:
        return [f"{where}: rainbow {found.kind} at {list(found.triple)}"]
    if c.kind == "bipartite" and all(P.parts):
        return [f"{where}: bipartite certificate has three nonempty parts"]
    return []


def _usage(log: EditLog, components: Sequence[Component]) -> dict[str, int]:
    counts = log.counts
    return {
        "deletions": counts.deletions,
        "bipartite_complementations": counts.bipartite_complementations,
        "curious": sum(c.kind != "three_uniform" for c in components),
        "three_uniform": sum(c.kind == "three_uniform" for c in components),
    }


def report_problems(G: Graph, r: DecompositionReport) -> list[str]:
    problems: list[str] = []
    if r.edit_log.input_graph_hash != G.digest():
        problems.append("edit log was recorded for a different input graph")
    try:
        after = replay(G, r.edit_log)
    except Exception as e:
        problems.append(f"edit log does not replay: {e}")
        after = None
    if after is not None:
        try:
            union = disjoint_union(c.graph for c in r.components)
        except ValueError as e:
            problems.append(f"components overlap: {e}")
        else:
            if union != after:
                problems.append("replayed graph differs from the union of the components")
    used = _usage(r.edit_log, r.components)
    for key, value in used.items():
        if value > r.budget.get(key, 0):
            problems.append(f"{key}: used {value}, budget {r.budget.get(key, 0)}")
    if r.edit_log.counts.subgraph_complementations:
        problems.append("subgraph complementations are not part of a C5 decomposition")
    for index, c in enumerate(r.components):
        problems.extend(_certificate_problems(c, index))
    for p in problems:
        logger.warning(f"decomposition report problem: {p}")
    return problems


def check_report(G: Graph, r: DecompositionReport) -> bool:
    return not report_problems(G, r)
