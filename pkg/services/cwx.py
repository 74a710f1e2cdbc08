from __future__ import annotations

import logging
import re
from collections.abc import Callable, Hashable, Iterator, Mapping
from typing import Any

from models.errors import ExpressionError
from models.expr import Create, CwExpr, Join, LabelledGraph, Relabel, Union
from models.graph import Graph, Vertex, vsorted

logger = logging.getLogger(__name__)


def children(e: CwExpr) -> tuple[CwExpr, ...]:
    if isinstance(e, Union):
        return (e.left, e.right)
    if isinstance(e, (Join, Relabel)):
        return (e.child,)
    return ()


def iter_postorder(e: CwExpr) -> Iterator[CwExpr]:
    stack: list[tuple[CwExpr, bool]] = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        stack.append((node, True))
        for child in reversed(children(node)):
            stack.append((child, False))


def map_expr(e: CwExpr, fn: Callable[[CwExpr, list[CwExpr]], CwExpr]) -> CwExpr:
    """Rebuild `e` bottom-up; `fn` gets each node and its already rebuilt children."""
    done: list[CwExpr] = []
    for node in iter_postorder(e):
        k = len(children(node))
        kids = done[len(done) - k :] if k else []
        if k:
            del done[len(done) - k :]
        done.append(fn(node, kids))
    return done[0]


def evaluate(e: CwExpr) -> LabelledGraph:
    # each stack entry: label -> vertices, plus the adjacency built so far
    values: list[tuple[dict[int, set[Vertex]], dict[Vertex, set[Vertex]]]] = []
    for node in iter_postorder(e):
        if isinstance(node, Create):
            values.append(({node.label: {node.vertex}}, {node.vertex: set()}))
        elif isinstance(node, Union):
            right_groups, right_adj = values.pop()
            left_groups, left_adj = values.pop()
            if len(right_adj) > len(left_adj):
                left_groups, right_groups = right_groups, left_groups
                left_adj, right_adj = right_adj, left_adj
            clash = left_adj.keys() & right_adj.keys()
            if clash:
                raise ExpressionError(f"vertex {vsorted(clash)[0]!r} is created twice")
            left_adj.update(right_adj)
            for label, vs in right_groups.items():
                left_groups.setdefault(label, set()).update(vs)
            values.append((left_groups, left_adj))
        elif isinstance(node, Join):
            groups, adj = values[-1]
            for a in groups.get(node.i, ()):
                for b in groups.get(node.j, ()):
                    adj[a].add(b)
                    adj[b].add(a)
        elif isinstance(node, Relabel):
            groups, _ = values[-1]
            moved = groups.pop(node.src, None)
            if moved:
                groups.setdefault(node.dst, set()).update(moved)
    groups, adj = values.pop()
    label_of = {v: label for label, vs in groups.items() for v in vs}
    return LabelledGraph(graph=Graph(adj), label_of=label_of)


def labels_used(e: CwExpr) -> frozenset[int]:
    out: set[int] = set()
    for node in iter_postorder(e):
        if isinstance(node, Create):
            out.add(node.label)
        elif isinstance(node, Join):
            out.update((node.i, node.j))
        elif isinstance(node, Relabel):
            out.update((node.src, node.dst))
    return frozenset(out)


def width(e: CwExpr) -> int:
    return len(labels_used(e))


def vertices_of(e: CwExpr) -> list[Vertex]:
    return [node.vertex for node in iter_postorder(e) if isinstance(node, Create)]


def verify(e: CwExpr, G: Graph) -> bool:
    try:
        return evaluate(e).graph == G
    except ExpressionError:
        logger.debug("expression failed to evaluate", exc_info=True)
        return False


def rename_labels(e: CwExpr, mapping: Mapping[int, int]) -> CwExpr:
    """Apply an injective label renaming; labels missing from `mapping` stay put."""

    def rename(node: CwExpr, kids: list[CwExpr]) -> CwExpr:
        if isinstance(node, Create):
            return Create(mapping.get(node.label, node.label), node.vertex)
        if isinstance(node, Union):
            return Union(kids[0], kids[1])
        if isinstance(node, Join):
            return Join(mapping.get(node.i, node.i), mapping.get(node.j, node.j), kids[0])
        assert isinstance(node, Relabel)
        return Relabel(mapping.get(node.src, node.src), mapping.get(node.dst, node.dst), kids[0])

    return map_expr(e, rename)


def compact_labels(e: CwExpr) -> CwExpr:
    used = sorted(labels_used(e))
    if used == list(range(1, len(used) + 1)):
        return e
    return rename_labels(e, {label: i for i, label in enumerate(used, start=1)})


def final_labels(e: CwExpr) -> frozenset[int]:
    sets: list[set[int]] = []
    for node in iter_postorder(e):
        if isinstance(node, Create):
            sets.append({node.label})
        elif isinstance(node, Union):
            right = sets.pop()
            sets[-1] |= right
        elif isinstance(node, Relabel) and node.src in sets[-1]:
            sets[-1].discard(node.src)
            sets[-1].add(node.dst)
    return frozenset(sets[-1])


def relabel_all(e: CwExpr, target: int) -> CwExpr:
    for label in sorted(final_labels(e)):
        if label != target:
            e = Relabel(label, target, e)
    return e


def union_all(exprs: list[CwExpr]) -> CwExpr:
    if not exprs:
        raise ExpressionError("no expressions to unite")
    out = exprs[0]
    for e in exprs[1:]:
        out = Union(out, e)
    return out


def edgeless_expression(vertices) -> CwExpr:
    return union_all([Create(1, v) for v in vsorted(vertices)])


def complete_expression(vertices) -> CwExpr:
    vs = vsorted(vertices)
    if not vs:
        raise ExpressionError("no vertices")
    out: CwExpr = Create(1, vs[0])
    for v in vs[1:]:
        out = Relabel(2, 1, Join(1, 2, Union(out, Create(2, v))))
    return out


def linear_expression(G: Graph) -> CwExpr:
    """One label per vertex; always valid, width |V(G)|."""
    if G.n == 0:
        raise ExpressionError("the empty graph has no expression")
    idx = G.index
    out: CwExpr = Create(1, G.vertices[0])
    for i, v in enumerate(G.vertices[1:], start=1):
        out = Union(out, Create(i + 1, v))
        for w in vsorted(G.neighbours(v)):
            if idx[w] < i:
                out = Join(idx[w] + 1, i + 1, out)
    return out


def substitute(quotient_expr: CwExpr, parts: Mapping[Vertex, CwExpr]) -> CwExpr:
    """
    Replace every leaf Create(l, v) of the quotient expression by the
    expression parts[v] with all its vertices relabelled to l.
    """
    leaves = set(vertices_of(quotient_expr))
    extra = set(parts) - leaves
    if extra:
        raise ExpressionError(f"parts given for vertices not in the quotient: {vsorted(extra)}")
    quotient_expr = compact_labels(quotient_expr)

    def plug(node: CwExpr, kids: list[CwExpr]) -> CwExpr:
        if isinstance(node, Create):
            if node.vertex not in parts:
                raise ExpressionError(f"no part expression for leaf {node.vertex!r}")
            part = parts[node.vertex]
            if isinstance(part, Create):
                return Create(node.label, part.vertex)
            return relabel_all(compact_labels(part), node.label)
        if isinstance(node, Union):
            return Union(kids[0], kids[1])
        if isinstance(node, Join):
            return Join(node.i, node.j, kids[0])
        assert isinstance(node, Relabel)
        return Relabel(node.src, node.dst, kids[0])

    return map_expr(quotient_expr, plug)


def rebuild_with_colours(
    e: CwExpr, target: Graph, colour: Mapping[Vertex, Hashable]
) -> CwExpr:
    """
    Expression for `target` that keeps the union tree of `e` and refines each
    label of `e` by the colour of its vertices. Edges are recomputed from
    `target` at the union where their endpoints meet, so `target` must be
    uniform between (label, colour) classes there; otherwise ExpressionError.
    Width is at most 2 * width(e) * number of colours.
    """
    e = compact_labels(e)
    k = width(e)
    palette: dict[Hashable, int] = {}
    for v in target.vertices:
        palette.setdefault(colour[v], len(palette))
    s = max(1, len(palette))

    def lab(label: int, c: int, side: int) -> int:
        return ((label - 1) * s + c) * 2 + side + 1

    # side 0 for the root; a union's right child flips its side
    sides: dict[int, int] = {id(e): 0}
    order: list[CwExpr] = []
    stack: list[tuple[CwExpr, bool]] = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        stack.append((node, True))
        side = sides[id(node)]
        if isinstance(node, Union):
            sides[id(node.left)] = side
            sides[id(node.right)] = 1 - side
        for child in children(node):
            sides.setdefault(id(child), side)
        for child in reversed(children(node)):
            stack.append((child, False))

    values: list[tuple[CwExpr, dict[tuple[int, int], set[Vertex]]]] = []
    for node in order:
        side = sides[id(node)]
        if isinstance(node, Create):
            if node.vertex not in target:
                raise ExpressionError(f"vertex {node.vertex!r} is not in the target graph")
            c = palette[colour[node.vertex]]
            values.append(
                (Create(lab(node.label, c, side), node.vertex), {(node.label, c): {node.vertex}})
            )
        elif isinstance(node, Join):
            continue
        elif isinstance(node, Relabel):
            expr, groups = values.pop()
            for c in range(s):
                moved = groups.pop((node.src, c), None)
                if moved is None:
                    continue
                expr = Relabel(lab(node.src, c, side), lab(node.dst, c, side), expr)
                groups.setdefault((node.dst, c), set()).update(moved)
            values.append((expr, groups))
        else:
            assert isinstance(node, Union)
            right_expr, right_groups = values.pop()
            left_expr, left_groups = values.pop()
            expr: CwExpr = Union(left_expr, right_expr)
            other = 1 - side
            for x_key in sorted(left_groups):
                xs = left_groups[x_key]
                for y_key in sorted(right_groups):
                    ys = right_groups[y_key]
                    hits = sum(len(target.neighbours(y) & xs) for y in ys)
                    if hits == len(xs) * len(ys):
                        expr = Join(lab(*x_key, side), lab(*y_key, other), expr)
                    elif hits:
                        raise ExpressionError(
                            f"target is not uniform between classes {x_key} and {y_key}"
                        )
            for y_key in sorted(right_groups):
                expr = Relabel(lab(*y_key, other), lab(*y_key, side), expr)
                left_groups.setdefault(y_key, set()).update(right_groups[y_key])
            values.append((expr, left_groups))
    result, _ = values.pop()
    logger.debug(f"rebuilt expression over {k} labels and {s} colours")
    return compact_labels(result)


# ---- term format ----

_TOKEN = re.compile(r"\s*(->|\(|\)|,|[A-Za-z_][A-Za-z0-9_]*|-?\d+)")


def _vertex_token(tok: str) -> Vertex:
    return int(tok) if re.fullmatch(r"-?\d+", tok) else tok


def to_term(e: CwExpr) -> str:
    parts: list[str] = []
    for node in iter_postorder(e):
        if isinstance(node, Create):
            parts.append(f"v({node.label},{node.vertex})")
        elif isinstance(node, Union):
            right = parts.pop()
            left = parts.pop()
            parts.append(f"un({left}, {right})")
        elif isinstance(node, Join):
            parts.append(f"join({node.i},{node.j}, {parts.pop()})")
        else:
            assert isinstance(node, Relabel)
            parts.append(f"rel({node.src}->{node.dst}, {parts.pop()})")
    return parts[0]


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


def parse_term(text: str) -> CwExpr:
    """Parse the term format, e.g. `rel(2->1, join(1,2, un(v(1,a), v(2,b))))`."""
    tokens = _tokenize(text)
    pos = 0

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ExpressionError("unexpected end of term")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise ExpressionError(f"expected {expected!r}, got {tok!r} at token {pos}")
        pos += 1
        return tok

    def take_int() -> int:
        tok = take()
        try:
            return int(tok)
        except ValueError:
            raise ExpressionError(f"expected a label, got {tok!r}") from None

    # open frames: [kind, args, children]
    frames: list[tuple[str, tuple[int, ...], list[CwExpr]]] = []
    while True:
        head = take()
        if head in ("un", "join", "rel"):
            take("(")
            args: tuple[int, ...] = ()
            if head == "join":
                i = take_int()
                take(",")
                j = take_int()
                take(",")
                args = (i, j)
            elif head == "rel":
                i = take_int()
                take("->")
                j = take_int()
                take(",")
                args = (i, j)
            frames.append((head, args, []))
            continue
        if head != "v":
            raise ExpressionError(f"unexpected token {head!r}")
        take("(")
        label = take_int()
        take(",")
        node: CwExpr = Create(label, _vertex_token(take()))
        take(")")
        while frames:
            kind, args, kids = frames[-1]
            kids.append(node)
            if kind == "un" and len(kids) == 1:
                take(",")
                break
            take(")")
            frames.pop()
            if kind == "un":
                node = Union(kids[0], kids[1])
            elif kind == "join":
                node = Join(args[0], args[1], kids[0])
            else:
                node = Relabel(args[0], args[1], kids[0])
        else:
            if pos != len(tokens):
                raise ExpressionError(f"trailing tokens after term: {tokens[pos:pos + 3]}")
            return node


def expr_to_json(e: CwExpr) -> dict[str, Any]:
    nodes: list[dict[str, Any]] = []
    index: list[int] = []
    for node in iter_postorder(e):
        if isinstance(node, Create):
            nodes.append({"op": "v", "label": node.label, "vertex": node.vertex})
        elif isinstance(node, Union):
            right = index.pop()
            left = index.pop()
            nodes.append({"op": "un", "left": left, "right": right})
        elif isinstance(node, Join):
            nodes.append({"op": "join", "i": node.i, "j": node.j, "child": index.pop()})
        else:
            assert isinstance(node, Relabel)
            nodes.append({"op": "rel", "src": node.src, "dst": node.dst, "child": index.pop()})
        index.append(len(nodes) - 1)
    return {"nodes": nodes, "root": index[-1]}


def expr_from_json(data: Mapping[str, Any]) -> CwExpr:
    built: list[CwExpr] = []
    for i, item in enumerate(data["nodes"]):
        op = item.get("op")
        try:
            if op == "v":
                built.append(Create(int(item["label"]), item["vertex"]))
            elif op == "un":
                built.append(Union(built[item["left"]], built[item["right"]]))
            elif op == "join":
                built.append(Join(int(item["i"]), int(item["j"]), built[item["child"]]))
            elif op == "rel":
                built.append(Relabel(int(item["src"]), int(item["dst"]), built[item["child"]]))
            else:
                raise ExpressionError(f"unknown op {op!r} at node {i}")
        except (KeyError, IndexError) as e:
            raise ExpressionError(f"malformed node {i}: {item!r}") from e
    return built[data["root"]]
