from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from functools import cmp_to_key
from typing import NamedTuple

from models.errors import ClaimViolation, ExpressionError
from models.expr import Create, CwExpr, Join, Relabel, Union
from models.graph import Graph, Vertex, vertex_key, vsorted
from models.partition import BlockStructure, SliceDecomposition, TriPartition
from models.poset import LabelledGraphW, Poset
from services.cwx import final_labels, map_expr, relabel_all, vertices_of
from services.graph_ops import disjoint_union, induced_subgraph
from services.patterns import find_2p2s, find_induced, pair_has_2P2, rainbow_violation
from services.wqo import higman_leq, labelled_embeds

logger = logging.getLogger(__name__)

BipLeaf = Callable[[Graph], CwExpr]


class SliceViolation(NamedTuple):
    u: Vertex
    v: Vertex
    expected: str


def _require_curious(G: Graph, P: TriPartition, stage: str) -> None:
    found = rainbow_violation(G, P)
    if found is not None:
        raise ClaimViolation(
            "graph has no rainbow K3 or 3P1 for the partition",
            stage=stage,
            witness={"kind": found.kind, "triple": list(found.triple)},
        )


def is_curious(G: Graph, P: TriPartition) -> bool:
    return rainbow_violation(G, P) is None


def curious_type(G: Graph, P: TriPartition) -> int:
    _require_curious(G, P, "curious_type")
    return sum(
        pair_has_2P2(G, a, b) for a, b in ((P.v1, P.v2), (P.v1, P.v3), (P.v2, P.v3))
    )


def monotone_order(G: Graph, P: TriPartition) -> list[Vertex]:
    """
    Order x1..xl of V1 with V2-neighbourhoods shrinking and V3-neighbourhoods
    growing along the order.
    """
    for name, other in (("V2", P.v2), ("V3", P.v3)):
        found = next(find_2p2s(G, P.v1, other), None)
        if found is not None:
            raise ClaimViolation(
                f"G[V1 ∪ {name}] is 2P2-free",
                stage="monotone_order",
                witness={"2P2": list(found)},
            )
    n2 = {x: G.neighbours(x) & P.v2 for x in P.v1}
    n3 = {x: G.neighbours(x) & P.v3 for x in P.v1}
    order = sorted(P.v1, key=lambda x: (-len(n2[x]), len(n3[x]), vertex_key(x)))
    for i, a in enumerate(order):
        for b in order[i + 1 :]:
            if not (n2[a] >= n2[b] and n3[a] <= n3[b]):
                raise ClaimViolation(
                    "V1 admits a monotone ordering",
                    stage="monotone_order",
                    witness={"incomparable": [a, b]},
                )
    return order


def validate_slices(G: Graph, D: SliceDecomposition) -> SliceViolation | None:
    """First pair breaking the cross rule between two slices, if any."""
    parts = D.partition.parts
    covered: set[Vertex] = set()
    for j, sl in enumerate(D.slices):
        for p in range(3):
            if not sl[p] <= parts[p]:
                raise ClaimViolation(
                    f"slice {j} part {p + 1} lies inside V{p + 1}", stage="validate_slices"
                )
            if covered & sl[p]:
                raise ClaimViolation("slices are disjoint", stage="validate_slices")
            covered |= sl[p]
    if covered != set(G.vertices):
        raise ClaimViolation("slices cover the graph", stage="validate_slices")
    for j, early in enumerate(D.slices):
        for late in D.slices[j + 1 :]:
            for p in range(3):
                for u in vsorted(early[p]):
                    nb = G.neighbours(u)
                    for v in vsorted(late[(p + 1) % 3]):
                        if v not in nb:
                            return SliceViolation(u, v, "complete")
                    for v in vsorted(late[(p + 2) % 3]):
                        if v in nb:
                            return SliceViolation(u, v, "anticomplete")
    return None


def _check_slices(G: Graph, D: SliceDecomposition, stage: str) -> None:
    bad = validate_slices(G, D)
    if bad is not None:
        raise ClaimViolation(
            "slices follow the complete/anti-complete pattern",
            stage=stage,
            witness={"pair": [bad.u, bad.v], "expected": bad.expected},
        )


def recompose_slices(D: SliceDecomposition, G: Graph) -> Graph:
    """Graph built from the slices of D (edges inside slices taken from G) and the cross rule."""
    adj: dict[Vertex, set[Vertex]] = {}
    for j in range(len(D)):
        inner = induced_subgraph(G, D.slice_vertices(j))
        for v in inner.vertices:
            adj[v] = set(inner.neighbours(v))
    for j, early in enumerate(D.slices):
        for late in D.slices[j + 1 :]:
            for p in range(3):
                for u in early[p]:
                    for v in late[(p + 1) % 3]:
                        adj[u].add(v)
                        adj[v].add(u)
    return Graph(adj)


def slice_type01(G: Graph, P: TriPartition) -> SliceDecomposition:
    P.validate(G)
    _require_curious(G, P, "slice_type01")
    frame = None
    for r in range(3):
        Q = P.rotate(r)
        if not pair_has_2P2(G, Q.v1, Q.v2) and not pair_has_2P2(G, Q.v1, Q.v3):
            frame = Q
            break
    if frame is None:
        raise ClaimViolation("two of the three pairs are 2P2-free", stage="slice_type01")
    order = monotone_order(G, frame)
    position = {x: i for i, x in enumerate(order, start=1)}
    ell = len(order)
    v2_slices: list[set[Vertex]] = [set() for _ in range(ell + 1)]
    v3_slices: list[set[Vertex]] = [set() for _ in range(ell + 1)]
    for y in frame.v2:
        seen = sorted(position[x] for x in G.neighbours(y) & frame.v1)
        if seen != list(range(1, len(seen) + 1)):
            raise ClaimViolation(
                "V1-neighbourhood of each V2 vertex is a prefix of the order",
                stage="slice_type01",
                witness={"vertex": y},
            )
        v2_slices[len(seen)].add(y)
    for z in frame.v3:
        seen = sorted(position[x] for x in G.neighbours(z) & frame.v1)
        start = ell - len(seen)
        if seen != list(range(start + 1, ell + 1)):
            raise ClaimViolation(
                "V1-neighbourhood of each V3 vertex is a suffix of the order",
                stage="slice_type01",
                witness={"vertex": z},
            )
        v3_slices[start].add(z)
    slices = tuple(
        (
            frozenset() if i == 0 else frozenset({order[i - 1]}),
            frozenset(v2_slices[i]),
            frozenset(v3_slices[i]),
        )
        for i in range(ell + 1)
    )
    D = SliceDecomposition(partition=frame, slices=slices)
    _check_slices(G, D, "slice_type01")
    for j, (a, _, c) in enumerate(slices):
        if not G.is_anticomplete_to(a, c):
            raise ClaimViolation(f"slice {j} is bipartite", stage="slice_type01")
    logger.debug(f"type 0/1 slicing: {ell + 1} slices over a V1 of size {ell}")
    return D


class _Blocks:
    """Mutable block state for type 2/3 slicing in a fixed frame."""

    def __init__(self, G: Graph, frame: TriPartition):
        self.G = G
        self.frame = frame
        self.z_order = vsorted(frame.v3)
        self.b1: list[set[Vertex]] = []
        self.b2: list[set[Vertex]] = []
        self.r1: set[Vertex] = set()
        self.r2: set[Vertex] = set()

    def pack(self) -> None:
        G, F = self.G, self.frame
        taken: set[Vertex] = set()
        groups: dict[tuple[int, ...], tuple[set[Vertex], set[Vertex]]] = {}
        for a1, a2, b1, b2 in find_2p2s(G, F.v1, F.v2):
            if taken & {a1, a2, b1, b2}:
                continue
            taken |= {a1, a2, b1, b2}
            signature = []
            for z in self.z_order:
                nb = G.neighbours(z)
                hits = (a1 in nb, a2 in nb, b1 in nb, b2 in nb)
                if hits == (True, True, False, False):
                    signature.append(1)
                elif hits == (False, False, True, True):
                    signature.append(2)
                else:
                    raise ClaimViolation(
                        "every V3 vertex sees exactly two vertices of a 2P2, on one side",
                        stage="slice_type23",
                        witness={"2P2": [a1, a2, b1, b2], "vertex": z},
                    )
            side1, side2 = groups.setdefault(tuple(signature), (set(), set()))
            side1 |= {a1, a2}
            side2 |= {b1, b2}
        ordered = sorted(groups.values(), key=cmp_to_key(self._compare))
        self.b1 = [set(a) for a, _ in ordered]
        self.b2 = [set(b) for _, b in ordered]
        self.r1 = set(F.v1) - taken
        self.r2 = set(F.v2) - taken
        logger.debug(f"packed {len(taken) // 4} 2P2s into {len(ordered)} blocks")

    def _compare(self, x: tuple[set[Vertex], set[Vertex]], y: tuple[set[Vertex], set[Vertex]]):
        G = self.G
        if G.is_complete_to(x[0], y[1]) and G.is_anticomplete_to(x[1], y[0]):
            return -1
        if G.is_complete_to(y[0], x[1]) and G.is_anticomplete_to(y[1], x[0]):
            return 1
        raise ClaimViolation(
            "distinct blocks are comparable",
            stage="slice_type23",
            witness={"blocks": [vsorted(x[0] | x[1]), vsorted(y[0] | y[1])]},
        )

    def check_chain(self) -> None:
        G = self.G
        p = len(self.b1)
        for i in range(p):
            for j in range(i + 1, p):
                if not (
                    G.is_complete_to(self.b1[i], self.b2[j])
                    and G.is_anticomplete_to(self.b2[i], self.b1[j])
                ):
                    raise ClaimViolation(
                        "blocks are linearly ordered by the chain relation",
                        stage="slice_type23",
                        witness={"blocks": [i + 1, j + 1]},
                    )
        for z in self.z_order:
            self.v3_index(z)

    def v3_index(self, z: Vertex) -> int:
        G = self.G
        sides = []
        for b1, b2 in zip(self.b1, self.b2, strict=True):
            if G.is_complete_to([z], b2) and G.is_anticomplete_to([z], b1):
                sides.append(2)
            elif G.is_complete_to([z], b1) and G.is_anticomplete_to([z], b2):
                sides.append(1)
            else:
                sides.append(0)
        i = 0
        while i < len(sides) and sides[i] == 2:
            i += 1
        if any(s != 1 for s in sides[i:]):
            raise ClaimViolation(
                "each V3 vertex has a threshold block",
                stage="slice_type23",
                witness={"vertex": z},
            )
        return i

    def update(self) -> bool:
        """One step of the update procedure; True when a residue vertex moved."""
        G = self.G
        for residue, mine, other in ((self.r1, self.b1, self.b2), (self.r2, self.b2, self.b1)):
            for x in vsorted(residue):
                nb = G.neighbours(x)
                for j, block in enumerate(other):
                    seen = nb & block
                    if seen and len(seen) < len(block):
                        residue.discard(x)
                        mine[j].add(x)
                        logger.debug(f"update procedure moved {x!r} into block {j + 1}")
                        return True
        return False

    def residue_index(self, x: Vertex, side: int) -> int:
        """Threshold of a residue vertex: index i of its class Y^i."""
        G = self.G
        blocks = self.b2 if side == 1 else self.b1
        # Y1: anti-complete to early blocks, complete to later ones; Y2 the reverse
        lead, tail = ("anti", "complete") if side == 1 else ("complete", "anti")
        rel = []
        for block in blocks:
            if G.is_complete_to([x], block):
                rel.append("complete")
            elif G.is_anticomplete_to([x], block):
                rel.append("anti")
            else:
                rel.append("mixed")
        i = 0
        while i < len(rel) and rel[i] == lead:
            i += 1
        if any(r != tail for r in rel[i:]):
            raise ClaimViolation(
                "each residue vertex has a threshold block",
                stage="slice_type23",
                witness={"vertex": x},
            )
        return i

    def absorb_residue_pair(self) -> bool:
        """
        Move a residue pair that breaks the cross rule into the block between
        their classes. Such a pair always sits in neighbouring classes.
        """
        G = self.G
        y1 = {x: self.residue_index(x, 1) for x in self.r1}
        y2 = {y: self.residue_index(y, 2) for y in self.r2}
        for x in vsorted(self.r1):
            nb = G.neighbours(x)
            for y in vsorted(self.r2):
                i, j = y1[x], y2[y]
                if i < j and y not in nb:
                    target = i
                elif j < i and y in nb:
                    target = j
                else:
                    continue
                if abs(i - j) != 1:
                    raise ClaimViolation(
                        "residue pairs breaking the slice pattern sit in neighbouring classes",
                        stage="slice_type23",
                        witness={"pair": [x, y], "classes": [i, j]},
                    )
                self.r1.discard(x)
                self.r2.discard(y)
                self.b1[target].add(x)
                self.b2[target].add(y)
                logger.debug(f"absorbed residue pair {x!r}, {y!r} into block {target + 1}")
                return True
        return False

    def structure(self) -> BlockStructure:
        p = len(self.b1)
        y1: list[set[Vertex]] = [set() for _ in range(p + 1)]
        y2: list[set[Vertex]] = [set() for _ in range(p + 1)]
        v3: list[set[Vertex]] = [set() for _ in range(p + 1)]
        for x in self.r1:
            y1[self.residue_index(x, 1)].add(x)
        for y in self.r2:
            y2[self.residue_index(y, 2)].add(y)
        for z in self.z_order:
            v3[self.v3_index(z)].add(z)
        return BlockStructure(
            blocks=tuple(
                (frozenset(a), frozenset(b)) for a, b in zip(self.b1, self.b2, strict=True)
            ),
            r1=frozenset(self.r1),
            r2=frozenset(self.r2),
            y1=tuple(frozenset(s) for s in y1),
            y2=tuple(frozenset(s) for s in y2),
            v3=tuple(frozenset(s) for s in v3),
        )


def _slice_type23_in(G: Graph, frame: TriPartition, t: int) -> SliceDecomposition:
    state = _Blocks(G, frame)
    state.pack()
    state.check_chain()
    while True:
        while state.update():
            state.check_chain()
        if not state.absorb_residue_pair():
            break
        state.check_chain()
    bs = state.structure()
    slices = [(bs.y1[0], bs.y2[0], bs.v3[0])]
    for i, (b1, b2) in enumerate(bs.blocks, start=1):
        slices.append((b1, b2, frozenset()))
        slices.append((bs.y1[i], bs.y2[i], bs.v3[i]))
    D = SliceDecomposition(partition=frame, slices=tuple(slices), blocks=bs)
    _check_slices(G, D, "slice_type23")
    for j in range(len(D)):
        sub = induced_subgraph(G, D.slice_vertices(j))
        st = curious_type(sub, D.slice_partition(j))
        if st > t - 1:
            raise ClaimViolation(
                f"every slice has type at most {t - 1}",
                stage="slice_type23",
                witness={"slice": j, "type": st},
            )
    return D


def slice_type23(G: Graph, P: TriPartition) -> SliceDecomposition:
    """
    Slices of type at most t-1 for a curious graph of type t in {2, 3}. The
    rotations of P and then of P with V1 and V2 swapped are tried in turn; the
    first frame with a 2P2 between V1 and V2 that slices cleanly is used.
    """
    P.validate(G)
    t = curious_type(G, P)
    if t < 2:
        raise ClaimViolation("graph has curious type 2 or 3", stage="slice_type23")
    first_error: ClaimViolation | None = None
    for base in (P, P.swap12()):
        for r in range(3):
            frame = base.rotate(r)
            if not pair_has_2P2(G, frame.v1, frame.v2):
                continue
            try:
                D = _slice_type23_in(G, frame, t)
            except ClaimViolation as e:
                logger.debug(f"frame rotation {r} failed: {e}")
                first_error = first_error or e
                continue
            logger.debug(f"type {t} slicing: {len(D)} slices")
            return D
    assert first_error is not None
    raise first_error


def _triplicate(e: CwExpr, part_of: dict[Vertex, int]) -> CwExpr:
    """Rewrite labels l to 3(l-1)+p where p is the part of the vertex, ending on labels 1..3."""

    def lab(label: int, p: int) -> int:
        return 3 * (label - 1) + p

    def rewrite(node: CwExpr, kids: list[CwExpr]) -> CwExpr:
        if isinstance(node, Create):
            return Create(lab(node.label, part_of[node.vertex]), node.vertex)
        if isinstance(node, Union):
            return Union(kids[0], kids[1])
        out = kids[0]
        if isinstance(node, Join):
            for p in (1, 2, 3):
                for q in (1, 2, 3):
                    out = Join(lab(node.i, p), lab(node.j, q), out)
            return out
        assert isinstance(node, Relabel)
        for p in (1, 2, 3):
            out = Relabel(lab(node.src, p), lab(node.dst, p), out)
        return out

    out = map_expr(e, rewrite)
    # finally every vertex goes to the label of its part
    for label in sorted(final_labels(out)):
        p = (label - 1) % 3 + 1
        if label != p:
            out = Relabel(label, p, out)
    return out


def compose_slices(
    slice_exprs: Sequence[CwExpr | None], partition: TriPartition
) -> CwExpr:
    """
    Expression for a sliced graph from expressions of its slices (None for an
    empty slice). Width at most max(3k, 6) for slice expressions of width k.
    """
    part_of = {v: p for p, part in enumerate(partition.parts, start=1) for v in part}
    seen: set[Vertex] = set()
    acc: CwExpr | None = None
    for e in slice_exprs:
        if e is None:
            continue
        vs = vertices_of(e)
        if seen & set(vs):
            raise ExpressionError(f"slice expressions overlap on {vsorted(seen & set(vs))}")
        seen.update(vs)
        missing = [v for v in vs if v not in part_of]
        if missing:
            raise ExpressionError(f"vertices {missing} are not in the partition")
        piece = _triplicate(e, part_of)
        if acc is None:
            acc = piece
            continue
        for p in (1, 2, 3):
            acc = Relabel(p, 3 + p, acc)
        acc = Union(acc, piece)
        acc = Join(4, 2, acc)
        acc = Join(5, 3, acc)
        acc = Join(6, 1, acc)
        for p in (1, 2, 3):
            acc = Relabel(3 + p, p, acc)
    if acc is None:
        raise ExpressionError("no slice expressions to compose")
    return acc


def curious_width_bound(leaf_width: int, t: int) -> int:
    bound = max(3 * leaf_width, 6)
    for _ in range(max(0, t - 1)):
        bound = max(3 * bound, 6)
    return bound


def curious_cw(G: Graph, P: TriPartition, bip_leaf: BipLeaf) -> CwExpr:
    P.validate(G)
    if G.n == 0:
        raise ExpressionError("the empty graph has no expression")
    _require_curious(G, P, "curious_cw")
    if not (P.v1 and P.v2 and P.v3):
        return bip_leaf(G)
    t = curious_type(G, P)
    if t <= 1:
        D = slice_type01(G, P)
        exprs = [
            bip_leaf(induced_subgraph(G, D.slice_vertices(j))) if D.slice_vertices(j) else None
            for j in range(len(D))
        ]
    else:
        D = slice_type23(G, P)
        exprs = []
        for j in range(len(D)):
            vs = D.slice_vertices(j)
            if not vs:
                exprs.append(None)
                continue
            exprs.append(curious_cw(induced_subgraph(G, vs), D.slice_partition(j), bip_leaf))
    logger.debug(f"curious graph of type {t} on {G.n} vertices: {len(D)} slices")
    return compose_slices(exprs, D.partition)


def build_sliced_graph(
    slices: Sequence[tuple[Graph, TriPartition]],
) -> tuple[Graph, SliceDecomposition]:
    """Assemble a 3-partite graph from slices (disjoint ids) and the cross rule."""
    inner = disjoint_union(g for g, _ in slices)
    parts: list[set[Vertex]] = [set(), set(), set()]
    for g, q in slices:
        q.validate(g)
        for p in range(3):
            parts[p] |= q.parts[p]
    frame = TriPartition.of(parts)
    D = SliceDecomposition(partition=frame, slices=tuple(q.parts for _, q in slices))
    return recompose_slices(D, inner), D


def slice_sequence(G: Graph, DG: SliceDecomposition, H: Graph, DH: SliceDecomposition) -> bool:
    """
    True when the slices of H, labelled by their part, embed in order into the
    slices of G; then H is an induced subgraph of G (checked).
    """
    parts = Poset.antichain(3)

    def labelled(graph: Graph, D: SliceDecomposition) -> list[LabelledGraphW]:
        out = []
        for j in range(len(D)):
            sub = induced_subgraph(graph, D.slice_vertices(j))
            labels = {v: p for p, part in enumerate(D.slices[j]) for v in part}
            out.append(LabelledGraphW(sub, labels))
        return out

    ok = higman_leq(
        labelled(H, DH),
        labelled(G, DG),
        lambda a, b: labelled_embeds(a, b, parts),  # type: ignore[arg-type]
    )
    if ok and find_induced(G, H) is None:
        raise ClaimViolation(
            "a slice-sequence embedding gives an induced subgraph", stage="slice_sequence"
        )
    return ok
