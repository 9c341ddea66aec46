"""Equality and order in the graph monoid by searching partial flows.

Elements are count vectors over the vertices (declaration order).  A flow
step replaces one copy of a non-sink vertex by the ranges of its edges.  Two
elements are equal iff they flow to a common element, and ``x <= y`` iff some
flow of ``x`` is dominated by some flow of ``y``.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping, Union

from .expr import NO, UNKNOWN, YES, MonoidExpr, Tri
from .graph import Graph

Element = Union[MonoidExpr, Mapping[str, int]]

DEFAULT_EQ_CAP = 100_000
DEFAULT_LEQ_CAP = 2_000


def _vector(g: Graph, x: Element) -> tuple[int, ...]:
    counts = x.forget() if isinstance(x, MonoidExpr) else x
    vec = [0] * len(g.vertices)
    for v, k in counts.items():
        if v not in g.index:
            raise KeyError(f"unknown vertex {v!r}")
        vec[g.index[v]] += k
    return tuple(vec)


def _out_rows(g: Graph) -> list[tuple[tuple[int, int], ...]]:
    rows = g.__dict__.get("_out_rows")
    if rows is None:
        rows = [tuple((j, m) for j, m in enumerate(row) if m) for row in g.matrix]
        g.__dict__["_out_rows"] = rows
    return rows


def _successors(rows, t: tuple[int, ...]):
    for i, c in enumerate(t):
        if c and rows[i]:
            nxt = list(t)
            nxt[i] -= 1
            for j, m in rows[i]:
                nxt[j] += m
            yield tuple(nxt)


def _render(g: Graph, t: tuple[int, ...]) -> str:
    return str(MonoidExpr({(g.vertices[i], 0): c for i, c in enumerate(t) if c}))


def _support(t: tuple[int, ...]) -> int:
    mask = 0
    for i, c in enumerate(t):
        if c:
            mask |= 1 << i
    return mask


def trapped_vertices(g: Graph, y_support: int) -> int:
    """Vertices every flow of which keeps a vertex the flows of ``y`` never reach.

    Greatest set inside the complement of ``y``'s descendants such that each
    member is a sink or has an edge back into the set.
    """
    reach = g.reach_mask
    rmask = 0
    m = y_support
    while m:
        low = m & -m
        rmask |= reach[low.bit_length() - 1]
        m ^= low
    n = len(g.vertices)
    trapped = ((1 << n) - 1) & ~rmask
    succ = g.succ_mask
    changed = True
    while changed:
        changed = False
        m = trapped
        while m:
            low = m & -m
            i = low.bit_length() - 1
            m ^= low
            if succ[i] and not succ[i] & trapped:
                trapped &= ~low
                changed = True
    return trapped


def _dominates(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _path_matching(g: Graph, a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """Each copy in ``a`` matched to a distinct copy in ``b`` that flows to it."""
    xs = [i for i, c in enumerate(a) for _ in range(c)]
    ys = [j for j, c in enumerate(b) for _ in range(c)]
    if len(xs) > len(ys) or len(ys) > 64:
        return False
    reach = g.reach_mask
    match_y: list[int] = [-1] * len(ys)

    def augment(xi: int, seen: set[int]) -> bool:
        for yj, vj in enumerate(ys):
            if yj in seen or not reach[vj] >> xs[xi] & 1:
                continue
            seen.add(yj)
            if match_y[yj] == -1 or augment(match_y[yj], seen):
                match_y[yj] = xi
                return True
        return False

    return all(augment(xi, set()) for xi in range(len(xs)))


def eq_graph_monoid(g: Graph, x: Element, y: Element, cap: int = DEFAULT_EQ_CAP) -> Tri:
    """Search for a common flow of ``x`` and ``y`` (levels, if any, are forgotten)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    a, b = _vector(g, x), _vector(g, y)
    if a == b:
        return YES(common=_render(g, a))
    for p, q in ((a, b), (b, a)):
        hit = trapped_vertices(g, _support(q)) & _support(p)
        if hit:
            v = g.vertices[(hit & -hit).bit_length() - 1]
            return NO(reason="trapped vertex", vertex=v)
    rows = _out_rows(g)
    seen = ({a}, {b})
    queues = (deque([a]), deque([b]))
    bound: list[int | None] = [None, None]
    explored = 2
    side = 0
    while True:
        if not queues[side]:
            if bound[side] is None:
                bound[side] = max(sum(t) for t in seen[side])
            side ^= 1
            if not queues[side]:
                if bound[side] is None:
                    bound[side] = max(sum(t) for t in seen[side])
                return NO(reason="both flow sets exhausted", explored=explored)
        t = queues[side].popleft()
        other = side ^ 1
        limit = bound[other]
        if limit is not None and sum(t) > limit:
            side = other if queues[other] else side
            continue
        for u in _successors(rows, t):
            if u in seen[side]:
                continue
            if limit is not None and sum(u) > limit:
                continue
            if u in seen[other]:
                return YES(common=_render(g, u), explored=explored)
            seen[side].add(u)
            queues[side].append(u)
            explored += 1
            if explored >= cap:
                return UNKNOWN(reason="cap exhausted", cap=cap)
        if queues[other]:
            side = other


def leq_graph_monoid(g: Graph, x: Element, y: Element, cap: int = DEFAULT_LEQ_CAP) -> Tri:
    """Three-valued ``x <= y`` in the graph monoid."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    a, b = _vector(g, x), _vector(g, y)
    if _dominates(a, b):
        return YES(reason="pointwise")
    hit = trapped_vertices(g, _support(b)) & _support(a)
    if hit:
        v = g.vertices[(hit & -hit).bit_length() - 1]
        return NO(reason="trapped vertex", vertex=v)
    if _path_matching(g, a, b):
        return YES(reason="path matching")
    rows = _out_rows(g)
    xs, ys = [a], [b]
    seen = ({a}, {b})
    queues = (deque([a]), deque([b]))
    y_bound: int | None = None
    explored = 2
    side = 1
    while True:
        if not queues[1] and y_bound is None:
            y_bound = max(sum(t) for t in ys)
        if not queues[side]:
            side ^= 1
            if not queues[side]:
                return NO(reason="flow sets exhausted", explored=explored)
        t = queues[side].popleft()
        if side == 0 and y_bound is not None and sum(t) > y_bound:
            side = 1 if queues[1] else 0
            continue
        for u in _successors(rows, t):
            if u in seen[side]:
                continue
            if side == 0:
                if y_bound is not None and sum(u) > y_bound:
                    continue
                if any(_dominates(u, w) for w in ys):
                    return YES(reason="dominated flow", flow=_render(g, u), explored=explored)
                xs.append(u)
            else:
                if any(_dominates(w, u) for w in xs):
                    return YES(reason="dominating flow", flow=_render(g, u), explored=explored)
                ys.append(u)
            seen[side].add(u)
            queues[side].append(u)
            explored += 1
            if explored >= cap:
                return UNKNOWN(reason="cap exhausted", cap=cap)
        if queues[side ^ 1]:
            side ^= 1
