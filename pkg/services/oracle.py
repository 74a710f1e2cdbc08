from __future__ import annotations

import json
import logging
import os
from itertools import combinations
from pathlib import Path
from threading import Lock

from dotenv import load_dotenv
from platformdirs import user_config_dir

from models.errors import OracleCapError
from models.expr import Create, CwExpr, Join, Relabel, Union
from models.graph import Graph, ModuleNode
from services.cwx import (
    complete_expression,
    edgeless_expression,
    map_expr,
    rename_labels,
    substitute,
    width,
)
from services.graph_io import graph_to_graph6
from services.graph_ops import modular_decomposition

load_dotenv()

DEFAULT_CACHE_DIR = Path(user_config_dir("TrifreeCW")) / "oracle_cache"
CACHE_FILE_NAME = "oracle_cache.json"
HARD_CAP = 16

Partition = tuple[int, ...]


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class OracleCache:
    """graph6 -> clique-width, persisted as JSON."""

    def __init__(self, cache_dir: Path | str):
        self.logger = logging.getLogger(__name__)
        self.path = Path(cache_dir) / CACHE_FILE_NAME
        self.lock = Lock()
        self.values: dict[str, int] = {}
        try:
            if self.path.exists():
                self.values = {
                    k: int(v) for k, v in json.loads(self.path.read_text("utf-8")).items()
                }
                self.logger.debug(f"Loaded {len(self.values)} oracle results from {self.path}")
        except Exception:
            self.logger.warning(f"Ignoring unreadable oracle cache at {self.path}")
            self.values = {}

    def get(self, key: str) -> int | None:
        with self.lock:
            return self.values.get(key)

    def put(self, key: str, value: int) -> None:
        with self.lock:
            self.values[key] = value
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self.path.write_text(json.dumps(self.values, sort_keys=True), encoding="utf-8")
            except Exception:
                self.logger.warning(f"Failed to write oracle cache to {self.path}")


class _PrimeSearch:
    """
    Exhaustive search for a k-expression of a graph on vertex indices 0..n-1.

    A state is a vertex set S (bitmask) together with a partition of S into at
    most k classes, each class having one neighbourhood outside S. A state is
    feasible when some k-expression builds G[S] and ends with exactly those
    classes as its label groups.
    """

    def __init__(self, masks: tuple[int, ...], k: int):
        self.masks = masks
        self.n = len(masks)
        self.full = (1 << self.n) - 1
        self.k = k
        self.memo: dict[tuple[int, Partition], tuple | None] = {}
        self.states = 0

    def outside_types(self, S: int) -> list[int]:
        groups: dict[int, int] = {}
        for v in _bits(S):
            key = self.masks[v] & ~S & self.full
            groups[key] = groups.get(key, 0) | (1 << v)
        return sorted(groups.values())

    def coarsest(self, S: int, within: Partition) -> Partition:
        parts = []
        for t in self.outside_types(S):
            for cls in within:
                if t & cls:
                    parts.append(t & cls)
        return tuple(sorted(parts))

    def refinements(self, base: Partition) -> list[Partition]:
        """Refinements of `base` with at most k classes, coarsest first."""
        room = self.k - len(base)
        if room < 0:
            return []
        options: list[list[list[int]]] = [_splits(cls, room) for cls in base]
        out: set[Partition] = set()

        def combine(i: int, acc: list[int]):
            if len(acc) > self.k:
                return
            if i == len(options):
                out.add(tuple(sorted(acc)))
                return
            for split in options[i]:
                combine(i + 1, acc + split)

        combine(0, [])
        return sorted(out, key=lambda p: (len(p), p))

    def feasible(self, S: int, lam: Partition) -> bool:
        key = (S, lam)
        if key in self.memo:
            return self.memo[key] is not None
        self.memo[key] = None
        self.states += 1
        if S & (S - 1) == 0:
            self.memo[key] = ("leaf",) if len(lam) == 1 else None
            return self.memo[key] is not None
        low = S & -S
        rest = S ^ low
        # S1 always holds the lowest vertex of S
        sub = rest
        while True:
            S1 = low | (rest & ~sub)
            S2 = S ^ S1
            if S2:
                choice = self._try_split(S, lam, S1, S2)
                if choice is not None:
                    self.memo[key] = choice
                    return True
            if sub == 0:
                break
            sub = (sub - 1) & rest
        return False

    def _try_split(self, S: int, lam: Partition, S1: int, S2: int):
        lam_of = {}
        for idx, cls in enumerate(lam):
            for v in _bits(cls):
                lam_of[v] = idx
        T1 = self.coarsest(S1, tuple(c & S1 for c in lam if c & S1))
        T2 = self.coarsest(S2, tuple(c & S2 for c in lam if c & S2))
        if len(T1) > self.k or len(T2) > self.k:
            return None
        for lam1 in self.refinements(T1):
            for lam2 in self.refinements(T2):
                for pairing in self._pairings(lam1, lam2, lam_of):
                    groups = self._groups(lam1, lam2, pairing)
                    joins = self._joins(groups)
                    if joins is None:
                        continue
                    if self.feasible(S1, lam1) and self.feasible(S2, lam2):
                        return ("split", S1, lam1, S2, lam2, pairing, joins)
        return None

    def _pairings(self, lam1: Partition, lam2: Partition, lam_of: dict[int, int]):
        """Matchings between classes of lam1 and lam2 that may share a label."""
        need = len(lam1) + len(lam2) - self.k
        compatible = []
        for a, A in enumerate(lam1):
            la = lam_of[_bits(A)[0]]
            for b, B in enumerate(lam2):
                if lam_of[_bits(B)[0]] != la:
                    continue
                if any(self.masks[v] & B for v in _bits(A)):
                    continue
                compatible.append((a, b))
        size_lo = max(0, need)
        for size in range(size_lo, min(len(lam1), len(lam2)) + 1):
            for combo in combinations(compatible, size):
                left = {a for a, _ in combo}
                right = {b for _, b in combo}
                if len(left) == size and len(right) == size:
                    yield combo

    def _groups(self, lam1: Partition, lam2: Partition, pairing) -> list[tuple[int, int]]:
        """Label groups after the union as (part in S1, part in S2) masks."""
        paired2 = {b: a for a, b in pairing}
        paired1 = {a: b for a, b in pairing}
        groups = []
        for a, A in enumerate(lam1):
            groups.append((A, lam2[paired1[a]] if a in paired1 else 0))
        for b, B in enumerate(lam2):
            if b not in paired2:
                groups.append((0, B))
        return groups

    def _joins(self, groups: list[tuple[int, int]]) -> list[tuple[int, int]] | None:
        joins = []
        for x in range(len(groups)):
            for y in range(x + 1, len(groups)):
                x1, x2 = groups[x]
                y1, y2 = groups[y]
                cross = self._any_edge(x1, y2) or self._any_edge(x2, y1)
                if not cross:
                    continue
                xs = x1 | x2
                ys = y1 | y2
                if not all(self.masks[v] & ys == ys for v in _bits(xs)):
                    return None
                joins.append((x, y))
        return joins

    def _any_edge(self, a: int, b: int) -> bool:
        if not a or not b:
            return False
        return any(self.masks[v] & b for v in _bits(a))

    def build(self, S: int, lam: Partition) -> tuple[CwExpr, dict[int, int]]:
        """Expression for a feasible state and the label of each class (by mask)."""
        choice = self.memo[(S, lam)]
        assert choice is not None
        if choice[0] == "leaf":
            return Create(1, _bits(S)[0]), {lam[0]: 1}
        _, S1, lam1, S2, lam2, pairing, joins = choice
        e1, labels1 = self.build(S1, lam1)
        e2, labels2 = self.build(S2, lam2)
        paired = {lam2[b]: lam1[a] for a, b in pairing}
        perm: dict[int, int] = {}
        taken = set(labels1.values())
        for cls in lam2:
            if cls in paired:
                perm[labels2[cls]] = labels1[paired[cls]]
        free = iter(lab for lab in range(1, self.k + 1) if lab not in taken)
        for cls in lam2:
            if cls not in paired:
                perm[labels2[cls]] = next(free)
        # extend to a bijection so labels used inside e2 stay distinct
        unused_targets = iter(sorted(set(range(1, self.k + 1)) - set(perm.values())))
        for lab in range(1, self.k + 1):
            if lab not in perm:
                perm[lab] = next(unused_targets)
        e2 = rename_labels(e2, perm)
        expr: CwExpr = Union(e1, e2)

        groups = self._groups(lam1, lam2, pairing)
        group_label = []
        for g1, g2 in groups:
            if g1:
                group_label.append(labels1[g1])
            else:
                group_label.append(perm[labels2[g2]])
        for x, y in joins:
            expr = Join(group_label[x], group_label[y], expr)
        labels: dict[int, int] = {}
        for cls in lam:
            members = [group_label[g] for g, (g1, g2) in enumerate(groups) if (g1 | g2) & cls]
            target = min(members)
            for lab in sorted(set(members)):
                if lab != target:
                    expr = Relabel(lab, target, expr)
            labels[cls] = target
        return expr, labels


def _splits(mask: int, room: int) -> list[list[int]]:
    """Set partitions of `mask` into at most room + 1 blocks, fewest blocks first."""
    elems = _bits(mask)
    out: list[list[int]] = []

    def grow(i: int, blocks: list[int]):
        if len(blocks) > room + 1:
            return
        if i == len(elems):
            out.append(list(blocks))
            return
        bit = 1 << elems[i]
        for j in range(len(blocks)):
            blocks[j] |= bit
            grow(i + 1, blocks)
            blocks[j] ^= bit
        blocks.append(bit)
        grow(i + 1, blocks)
        blocks.pop()

    grow(0, [])
    return sorted(out, key=len)


class CliqueWidthOracle:
    """
    Exact clique-width for small graphs.

    The graph is reduced through its modular decomposition: edgeless and
    complete quotients need one and two labels, prime quotients are searched
    exhaustively from three labels upward, and the pieces are put back
    together with `substitute`.
    """

    def __init__(self, cap: int | None = None, cache_dir: Path | str | None = None):
        self.logger = logging.getLogger(__name__)
        self.cap = cap if cap is not None else int(os.getenv("TRIFREE_CW_ORACLE_CAP", "12"))
        if self.cap > HARD_CAP:
            raise OracleCapError(f"oracle cap {self.cap} exceeds the hard limit {HARD_CAP}")
        self.cache = OracleCache(cache_dir) if cache_dir is not None else None

    def _check_cap(self, G: Graph) -> None:
        if G.n > self.cap:
            raise OracleCapError(f"graph has {G.n} vertices, oracle cap is {self.cap}")

    def exact_cw(self, G: Graph, k_max: int) -> int | None:
        found = self.exact_expression(G, k_max)
        return None if found is None else width(found)

    def exact_expression(self, G: Graph, k_max: int) -> CwExpr | None:
        self._check_cap(G)
        if G.n == 0:
            return None
        if G.edge_count == 0:
            return edgeless_expression(G.vertices)
        tree = modular_decomposition(G)
        return self._node_expression(tree, k_max)

    def _node_expression(self, node: ModuleNode, k_max: int) -> CwExpr | None:
        if node.kind == "leaf":
            return Create(1, node.representative)
        assert node.quotient is not None
        parts: dict = {}
        for child in node.children:
            sub = self._node_expression(child, k_max)
            if sub is None:
                return None
            parts[child.representative] = sub
        if node.kind == "parallel":
            quotient_expr = edgeless_expression(node.quotient.vertices)
        elif node.kind == "series":
            if k_max < 2:
                return None
            quotient_expr = complete_expression(node.quotient.vertices)
        else:
            found = self.prime_expression(node.quotient, k_max)
            if found is None:
                return None
            quotient_expr = found
        return substitute(quotient_expr, parts)

    def prime_expression(self, H: Graph, k_max: int) -> CwExpr | None:
        """Minimum-width expression of a prime graph, or None above k_max."""
        key = graph_to_graph6(H)
        known = self.cache.get(key) if self.cache is not None else None
        start = known if known is not None else 3
        if start > k_max:
            return None
        for k in range(start, k_max + 1):
            search = _PrimeSearch(H.masks, k)
            full = (1 << H.n) - 1
            if search.feasible(full, (full,)):
                self.logger.info(f"prime graph on {H.n} vertices has clique-width {k}")
                self.logger.debug(f"search visited {search.states} states at k={k}")
                if self.cache is not None and known is None:
                    self.cache.put(key, k)
                expr, _ = search.build(full, (full,))
                return _to_vertex_ids(expr, H)
            self.logger.debug(f"no {k}-expression after {search.states} states")
        return None


def _to_vertex_ids(e: CwExpr, H: Graph) -> CwExpr:
    """Replace the vertex indices 0..n-1 used by the search with the ids of H."""

    def swap(node: CwExpr, kids: list[CwExpr]) -> CwExpr:
        if isinstance(node, Create):
            return Create(node.label, H.vertices[node.vertex])  # type: ignore[index]
        if isinstance(node, Union):
            return Union(kids[0], kids[1])
        if isinstance(node, Join):
            return Join(node.i, node.j, kids[0])
        assert isinstance(node, Relabel)
        return Relabel(node.src, node.dst, kids[0])

    return map_expr(e, swap)
