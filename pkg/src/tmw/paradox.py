"""Paradoxical decompositions of the order unit in the talented monoid."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .expr import NO, UNKNOWN, YES, MonoidExpr, Tri, parse_expr
from .flow import leq_talented, lt_talented, order_unit
from .graph import Graph, HypothesisError
from .structure import NO_EXIT, classify_cycles


@dataclass(frozen=True)
class ParadoxWitness:
    """Parts ``x_i`` with ``sum x_i >= [T]`` while ``sum shift(x_i, a_i) < [T]``."""
    parts: tuple[MonoidExpr, ...]
    shifts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "shifts", tuple(int(a) for a in self.shifts))
        if len(self.parts) != len(self.shifts):
            raise ValueError(f"{len(self.parts)} parts but {len(self.shifts)} shifts")
        if not self.parts:
            raise ValueError("a witness needs at least one part")
        if any(not x for x in self.parts):
            raise ValueError("witness parts must be nonzero")

    def to_dict(self) -> dict:
        return {"parts": [str(x) for x in self.parts], "shifts": list(self.shifts)}


def parse_witness(text: str, vertices=None) -> ParadoxWitness:
    data = json.loads(text)
    try:
        parts = [parse_expr(p, vertices) for p in data["parts"]]
        shifts = data["shifts"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed witness: {exc}") from None
    return ParadoxWitness(tuple(parts), tuple(shifts))


def is_paradoxical(g: Graph) -> bool:
    """Some cycle has an exit: a nontrivial component other than a terminal bare cycle."""
    return any(e.kind != NO_EXIT for e in classify_cycles(g).entries)


def _distances(g: Graph, start: str) -> dict[str, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for e in g.out_edges[u]:
            if e.dst not in dist:
                dist[e.dst] = dist[u] + 1
                queue.append(e.dst)
    return dist


def _closed_walk_lengths(g: Graph) -> dict[str, int]:
    """Per vertex, the shortest closed walk through it that visits a vertex with two out-edges."""
    dist = {v: _distances(g, v) for v in g.vertices}
    best: dict[str, int] = {}
    for b in g.vertices:
        if len(g.out_edges[b]) < 2:
            continue
        loop = min((1 + dist[e.dst][b] for e in g.out_edges[b] if b in dist[e.dst]), default=None)
        if loop is None:
            continue
        for u in g.vertices:
            if u == b:
                n = loop
            elif b in dist[u] and u in dist[b]:
                n = dist[u][b] + dist[b][u]
            else:
                continue
            if n < best.get(u, n + 1):
                best[u] = n
    return best


def build_witness(g: Graph) -> ParadoxWitness:
    """Take ``u`` on a shortest closed walk of length ``n`` through a branching vertex.

    Flowing ``u`` along that walk gives ``u = u(n) + x`` with ``x`` nonzero,
    so ``u(n)`` plus the remaining vertices sits strictly below the unit.
    """
    if not is_paradoxical(g):
        raise HypothesisError("graph has no cycle with an exit")
    best = _closed_walk_lengths(g)
    n = min(best.values())
    u = next(v for v in g.vertices if best.get(v) == n)
    rest = [v for v in g.vertices if v != u]
    return ParadoxWitness(
        (MonoidExpr.gen(u),) + tuple(MonoidExpr.gen(v) for v in rest),
        (n,) + (0,) * len(rest))


def verify_witness(g: Graph, w: ParadoxWitness, cap: int | None = None) -> Tri:
    if cap is None:
        cap = 4 * len(g.vertices) or 1
    unit = order_unit(g)
    total = MonoidExpr.sum(w.parts)
    shifted = MonoidExpr.sum(x.shift(a) for x, a in zip(w.parts, w.shifts))
    covers = leq_talented(g, unit, total, cap)
    below = lt_talented(g, shifted, unit, cap)
    cert = {"covers": covers.verdict.value, "strictly_below": below.verdict.value}
    if covers.no or below.no:
        return NO(**cert)
    if covers.yes and below.yes:
        return YES(**cert)
    return UNKNOWN(**cert)
