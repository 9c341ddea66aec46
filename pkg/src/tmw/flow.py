"""Exact arithmetic in the talented monoid via level-stratified flows.

Elements are handled as generators ``v(i)`` of the covering graph.  A
generator at a non-sink vertex may be replaced by the ranges of its outgoing
edges one level up; sinks never move.  Flowing every non-sink term up to a
common frontier level ``L`` gives a :class:`FlowState` which two expressions
share exactly when they are equal at some frontier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .expr import NO, UNKNOWN, YES, MonoidExpr, Tri
from .graph import Graph, scc


class _FlowData:
    """Per-graph flow tables: non-sinks are indexed densely for the live vector."""

    __slots__ = ("nonsinks", "pos", "ns_out", "sink_out", "cycles")

    def __init__(self, g: Graph):
        self.nonsinks = tuple(v for v in g.vertices if g.out_edges[v])
        self.pos = {v: i for i, v in enumerate(self.nonsinks)}
        self.ns_out: list[list[tuple[int, int]]] = []
        self.sink_out: list[list[tuple[str, int]]] = []
        for v in self.nonsinks:
            ns: dict[int, int] = {}
            sk: dict[str, int] = {}
            for e in g.out_edges[v]:
                if e.dst in self.pos:
                    ns[self.pos[e.dst]] = ns.get(self.pos[e.dst], 0) + 1
                else:
                    sk[e.dst] = sk.get(e.dst, 0) + 1
            self.ns_out.append(sorted(ns.items()))
            self.sink_out.append(sorted(sk.items()))
        self.cycles = _closed_cycles(g, self.pos)


@dataclass(frozen=True)
class _ClosedCycle:
    """A terminal cycle with no exits: mass entering it keeps its phase forever.

    ``phase_of`` maps a live index on the cycle to its offset along the cycle;
    ``feeders`` are live indices off the cycle that can still reach it.
    """
    length: int
    phase_of: dict[int, int]
    feeders: tuple[int, ...]


def _closed_cycles(g: Graph, pos: dict[str, int]) -> list[_ClosedCycle]:
    cond = scc(g)
    out = []
    for ci, members in enumerate(cond.components):
        if cond.trivial[ci] or not cond.terminal[ci]:
            continue
        if any(len(g.out_edges[v]) != 1 for v in members):
            continue
        phase, v = {}, members[0]
        while pos[v] not in phase:
            phase[pos[v]] = len(phase)
            v = g.out_edges[v][0].dst
        target = 0
        for m in members:
            target |= 1 << g.index[m]
        feeders = tuple(pos[u] for u in pos
                        if u not in members and g.reach_mask[g.index[u]] & target)
        out.append(_ClosedCycle(len(members), phase, feeders))
    return out


def _cycle_violation(fd: _FlowData, live_x: list[int], live_y: list[int], level: int):
    """A phase class on a closed cycle where ``x`` already holds more than ``y`` ever will."""
    for cyc in fd.cycles:
        if any(live_y[i] for i in cyc.feeders):
            continue
        mx = [0] * cyc.length
        my = [0] * cyc.length
        for i, p in cyc.phase_of.items():
            k = (level - p) % cyc.length
            mx[k] += live_x[i]
            my[k] += live_y[i]
        for i, p in cyc.phase_of.items():
            k = (level - p) % cyc.length
            if mx[k] > my[k]:
                return fd.nonsinks[i]
    return None


def _flow_data(g: Graph) -> _FlowData:
    fd = g.__dict__.get("_flow_data")
    if fd is None:
        fd = g.__dict__["_flow_data"] = _FlowData(g)
    return fd


def _advance(fd: _FlowData, live: list[int], level: int) -> tuple[list[int], dict[tuple[str, int], int]]:
    """One complete flow step from ``level`` to ``level + 1``; returns (live, new deposits)."""
    nxt = [0] * len(live)
    dep: dict[tuple[str, int], int] = {}
    for i, c in enumerate(live):
        if not c:
            continue
        for j, m in fd.ns_out[i]:
            nxt[j] += c * m
        for s, m in fd.sink_out[i]:
            key = (s, level + 1)
            dep[key] = dep.get(key, 0) + c * m
    return nxt, dep


@dataclass(frozen=True)
class FlowState:
    """Normal form at frontier ``level``: live non-sink counts plus frozen sink deposits."""
    level: int
    live: Mapping[str, int]
    deposits: Mapping[tuple[str, int], int] = field(default_factory=dict)

    def to_expr(self) -> MonoidExpr:
        terms = {(v, self.level): k for v, k in self.live.items()}
        terms.update(self.deposits)
        return MonoidExpr(terms)

    def __add__(self, other: "FlowState") -> "FlowState":
        if self.level != other.level:
            raise ValueError("flow states at different frontiers")
        live = dict(self.live)
        for v, k in other.live.items():
            live[v] = live.get(v, 0) + k
        dep = dict(self.deposits)
        for key, k in other.deposits.items():
            dep[key] = dep.get(key, 0) + k
        return FlowState(self.level, live, dep)


class _Run:
    """Mutable flow of one expression; the frontier only moves upward."""

    __slots__ = ("fd", "level", "live", "deposits", "fresh")

    def __init__(self, g: Graph, x: MonoidExpr, level: int):
        fd = self.fd = _flow_data(g)
        terms = x.terms
        if terms:
            top = max(lvl for _, lvl in terms)
            if level < top:
                raise ValueError(f"frontier {level} below top level {top} of {x}")
            start = min(lvl for _, lvl in terms)
        else:
            start = level
        by_level: dict[int, list[tuple[str, int]]] = {}
        for (v, lvl), k in terms.items():
            if v not in g.index:
                raise KeyError(f"unknown vertex {v!r}")
            by_level.setdefault(lvl, []).append((v, k))
        live = [0] * len(fd.nonsinks)
        deposits: dict[tuple[str, int], int] = {}
        lvl = start
        while True:
            for v, k in by_level.get(lvl, ()):
                p = fd.pos.get(v)
                if p is None:
                    deposits[(v, lvl)] = deposits.get((v, lvl), 0) + k
                else:
                    live[p] += k
            if lvl == level:
                break
            live, dep = _advance(fd, live, lvl)
            for key, k in dep.items():
                deposits[key] = deposits.get(key, 0) + k
            lvl += 1
        self.level = level
        self.live = live
        self.deposits = deposits
        self.fresh: dict[tuple[str, int], int] = {}

    def step(self) -> None:
        self.live, self.fresh = _advance(self.fd, self.live, self.level)
        for key, k in self.fresh.items():
            self.deposits[key] = self.deposits.get(key, 0) + k
        self.level += 1

    def state(self) -> FlowState:
        live = {v: c for v, c in zip(self.fd.nonsinks, self.live) if c}
        return FlowState(self.level, live, dict(self.deposits))


def _span(*xs: MonoidExpr) -> tuple[int, int] | None:
    lv = [lvl for x in xs for lvl in x.levels()]
    if not lv:
        return None
    return min(lv), max(lv)


def normal_form(g: Graph, x: MonoidExpr, level: int) -> FlowState:
    """Flow every non-sink term of ``x`` up to frontier ``level``."""
    return _Run(g, x, level).state()


def flow_states(g: Graph, x: MonoidExpr, start: int, stop: int) -> Iterator[FlowState]:
    """Normal forms of ``x`` at frontiers ``start..stop`` inclusive."""
    run = _Run(g, x, start)
    yield run.state()
    while run.level < stop:
        run.step()
        yield run.state()


def partial_flow_step(g: Graph, x: MonoidExpr, v: str, level: int) -> MonoidExpr:
    """Replace one occurrence of ``v(level)`` by the ranges of ``v``'s edges one level up."""
    terms = x.terms
    if terms.get((v, level), 0) < 1:
        raise ValueError(f"{v}({level}) does not occur in {x}")
    if not g.out_edges[v]:
        raise ValueError(f"{v} is a sink")
    terms[(v, level)] -= 1
    for e in g.out_edges[v]:
        key = (e.dst, level + 1)
        terms[key] = terms.get(key, 0) + 1
    return MonoidExpr(terms)


def order_unit(g: Graph) -> MonoidExpr:
    return MonoidExpr({(v, 0): 1 for v in g.vertices})


def decide_eq(g: Graph, x: MonoidExpr, y: MonoidExpr) -> Tri:
    """Exact equality in the talented monoid, with the deciding frontier as certificate.

    Live differences evolve under a fixed integer matrix on the non-sink
    coordinates, so if the two flows have not met within that many further
    steps they never will; a deposit mismatch is permanent at once.
    """
    span = _span(x, y)
    if span is None:
        return YES(level=0)
    top = span[1]
    rx, ry = _Run(g, x, top), _Run(g, y, top)
    if rx.deposits != ry.deposits:
        return NO(reason="deposits differ", level=top)
    bound = len(rx.fd.nonsinks)
    for step in range(bound + 1):
        if rx.live == ry.live:
            return YES(level=rx.level)
        if step == bound:
            break
        rx.step()
        ry.step()
        if rx.fresh != ry.fresh:
            return NO(reason="deposits differ", level=rx.level)
    return NO(reason="kernel bound exhausted", level=rx.level)


def eq_talented(g: Graph, x: MonoidExpr, y: MonoidExpr) -> bool:
    return decide_eq(g, x, y).yes


def default_cap(g: Graph, *xs: MonoidExpr) -> int:
    span = _span(*xs)
    return len(g.vertices) ** 2 + (span[1] - span[0] if span else 0)


def _deposit_violation(dx: Mapping, dy: Mapping):
    for key, k in dx.items():
        if k > dy.get(key, 0):
            return key
    return None


def leq_talented(g: Graph, x: MonoidExpr, y: MonoidExpr, cap: int | None = None) -> Tri:
    """Three-valued test of ``x <= y``: some ``z`` with ``x + z = y``.

    ``yes`` carries the frontier and the difference ``z``.  ``no`` carries
    either a sink deposit of ``x`` exceeding that of ``y``, or a phase class
    of a closed cycle where ``x`` holds more than ``y`` and nothing of ``y``
    can still flow in; neither can ever be undone.
    """
    if cap is None:
        cap = default_cap(g, x, y)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not x:
        return YES(level=0, difference=str(y))
    if not y:
        return NO(reason="nonzero element below zero")
    top = _span(x, y)[1]
    rx, ry = _Run(g, x, top), _Run(g, y, top)
    bad = _deposit_violation(rx.deposits, ry.deposits)
    for step in range(cap + 1):
        if bad is not None:
            v, lvl = bad
            return NO(reason="deposit exceeded", vertex=v, level=lvl)
        stuck = _cycle_violation(rx.fd, rx.live, ry.live, rx.level)
        if stuck is not None:
            return NO(reason="closed cycle mass exceeded", vertex=stuck, level=rx.level)
        if all(a <= b for a, b in zip(rx.live, ry.live)):
            xs = rx.state().to_expr().terms
            z = MonoidExpr({k: m - xs.get(k, 0) for k, m in ry.state().to_expr().terms.items()})
            return YES(level=rx.level, difference=str(z))
        if step == cap:
            break
        rx.step()
        ry.step()
        bad = _deposit_violation(rx.fresh, ry.fresh)
    return UNKNOWN(reason="cap exhausted", cap=cap)


def lt_talented(g: Graph, x: MonoidExpr, y: MonoidExpr, cap: int | None = None) -> Tri:
    eq = decide_eq(g, x, y)
    if eq.yes:
        return NO(reason="equal", level=eq.certificate["level"])
    le = leq_talented(g, x, y, cap)
    if le.yes:
        return YES(**le.certificate)
    return le
