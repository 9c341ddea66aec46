"""Source removal, in-splitting and out-splitting, with their induced generator maps.

Each move returns the new graph; the ``induced_map_*`` functions build the
explicit map between talented monoids together with its candidate inverse,
and :func:`verify_map` checks both on a window of levels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .expr import NO, UNKNOWN, YES, MonoidExpr, Tri
from .flow import eq_talented
from .graph import Edge, Graph, HypothesisError, regular_sources
from .graph_monoid import eq_graph_monoid


class PlanError(ValueError):
    """A split plan that is not a partition of the relevant edge sets."""


def in_name(v: str, i: int) -> str:
    return f"{v}.{i}"


def out_name(v: str, i: int) -> str:
    return f"{v}^{i}"


@dataclass(frozen=True)
class SplitPlan:
    """Ordered partition of incoming (``kind='in'``) or outgoing (``kind='out'``) edges per vertex.

    Vertices left out get the one-block partition.
    """
    kind: str
    blocks: Mapping[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("in", "out"):
            raise PlanError(f"unknown plan kind {self.kind!r}")
        object.__setattr__(self, "blocks",
                           {v: tuple(tuple(b) for b in bs) for v, bs in self.blocks.items()})

    def _edges_at(self, g: Graph, v: str) -> tuple[Edge, ...]:
        return g.in_edges[v] if self.kind == "in" else g.out_edges[v]

    def partition(self, g: Graph, v: str) -> tuple[tuple[str, ...], ...]:
        """Blocks at ``v``; empty when ``v`` has no edges of the relevant direction."""
        edges = self._edges_at(g, v)
        if not edges:
            return ()
        if v in self.blocks:
            return self.blocks[v]
        return (tuple(e.id for e in edges),)

    def validate(self, g: Graph) -> None:
        for v, bs in self.blocks.items():
            if v not in g.index:
                raise PlanError(f"plan names unknown vertex {v!r}")
            expected = {e.id for e in self._edges_at(g, v)}
            if not expected:
                raise PlanError(f"vertex {v!r} has no {self.kind}going edges to partition")
            seen: set[str] = set()
            for b in bs:
                if not b:
                    raise PlanError(f"empty block at {v!r}")
                for eid in b:
                    if eid in seen:
                        raise PlanError(f"edge {eid!r} appears twice at {v!r}")
                    if eid not in expected:
                        raise PlanError(f"edge {eid!r} is not a {self.kind}going edge of {v!r}")
                    seen.add(eid)
            if seen != expected:
                missing = sorted(expected - seen)
                raise PlanError(f"blocks at {v!r} miss edges {missing}")

    def block_of(self, g: Graph) -> dict[str, int]:
        """Edge id to its 1-based block index at the partitioned endpoint."""
        out = {}
        for v in g.vertices:
            for i, b in enumerate(self.partition(g, v), start=1):
                for eid in b:
                    out[eid] = i
        return out

    def to_json(self) -> list[dict]:
        return [{"vertex": v, "blocks": [list(b) for b in bs]} for v, bs in self.blocks.items()]


def InSplitPlan(blocks: Mapping[str, Sequence[Sequence[str]]] | None = None) -> SplitPlan:
    return SplitPlan("in", blocks or {})


def OutSplitPlan(blocks: Mapping[str, Sequence[Sequence[str]]] | None = None) -> SplitPlan:
    return SplitPlan("out", blocks or {})


def parse_plan(text: str, kind: str) -> SplitPlan:
    """Read ``[{"vertex": v, "blocks": [[edge ids], ...]}, ...]`` (optionally wrapped as ``{"plan": [...]}``)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanError(f"invalid plan JSON at line {exc.lineno}: {exc.msg}") from None
    if isinstance(data, dict):
        data = data.get("plan", [data] if "vertex" in data else None)
    if not isinstance(data, list):
        raise PlanError("plan must be a list of {vertex, blocks} objects")
    blocks: dict[str, list[list[str]]] = {}
    for item in data:
        try:
            v, bs = str(item["vertex"]), [[str(e) for e in b] for b in item["blocks"]]
        except (KeyError, TypeError):
            raise PlanError(f"malformed plan entry {item!r}") from None
        if v in blocks:
            raise PlanError(f"vertex {v!r} listed twice")
        blocks[v] = bs
    return SplitPlan(kind, blocks)


# -- the moves --

def move_source_removal(g: Graph, v: str) -> Graph:
    if v not in g.index:
        raise KeyError(f"unknown vertex {v!r}")
    if v not in regular_sources(g):
        raise HypothesisError(f"{v!r} is not a regular source")
    return g.subgraph(u for u in g.vertices if u != v)


def move_in_split(g: Graph, plan: SplitPlan) -> Graph:
    if plan.kind != "in":
        raise PlanError("move_in_split needs an in-split plan")
    plan.validate(g)
    m = {v: len(plan.partition(g, v)) for v in g.vertices}
    block = plan.block_of(g)
    verts = []
    for v in g.vertices:
        verts += [in_name(v, i) for i in range(1, m[v] + 1)] if m[v] else [v]
    edges = []
    for e in g.edges:
        dst = in_name(e.dst, block[e.id])
        if m[e.src]:
            edges += [Edge(in_name(e.id, j), in_name(e.src, j), dst)
                      for j in range(1, m[e.src] + 1)]
        else:
            edges.append(Edge(e.id, e.src, dst))
    return Graph(tuple(verts), tuple(edges))


def move_out_split(g: Graph, plan: SplitPlan) -> Graph:
    if plan.kind != "out":
        raise PlanError("move_out_split needs an out-split plan")
    plan.validate(g)
    m = {v: len(plan.partition(g, v)) for v in g.vertices}
    block = plan.block_of(g)
    verts = []
    for v in g.vertices:
        verts += [out_name(v, i) for i in range(1, m[v] + 1)] if m[v] else [v]
    edges = []
    for e in g.edges:
        src = out_name(e.src, block[e.id])
        if m[e.dst]:
            edges += [Edge(out_name(e.id, j), src, out_name(e.dst, j))
                      for j in range(1, m[e.dst] + 1)]
        else:
            edges.append(Edge(e.id, src, e.dst))
    return Graph(tuple(verts), tuple(edges))


# -- induced maps --

@dataclass
class GeneratorMap:
    """Additive, shift-equivariant map fixed by the images of the level-0 generators."""
    domain: Graph
    codomain: Graph
    images: dict[str, MonoidExpr]
    inverse: "GeneratorMap | None" = None
    name: str = ""

    def __post_init__(self):
        missing = [v for v in self.domain.vertices if v not in self.images]
        if missing:
            raise ValueError(f"map undefined on {missing}")
        for v, img in self.images.items():
            stray = img.vertices() - set(self.codomain.index)
            if stray:
                raise ValueError(f"image of {v!r} uses vertices outside the codomain: {sorted(stray)}")

    def apply(self, x: MonoidExpr) -> MonoidExpr:
        return MonoidExpr.sum(self.images[v].shift(lvl) * k for (v, lvl), k in x.terms.items())

    def to_dict(self) -> dict:
        return {v: str(self.images[v]) for v in self.domain.vertices}


def _check_pair(g: Graph, f: Graph, expected: Graph, what: str) -> None:
    if f != expected:
        raise HypothesisError(f"codomain is not the {what} of the domain under this plan")


def induced_map_source_removal(g: Graph, f: Graph, v: str) -> GeneratorMap:
    """Map from the graph with the source to the graph without it; the source expands along its edges."""
    _check_pair(g, f, move_source_removal(g, v), "source removal")
    images = {u: MonoidExpr.gen(u) for u in f.vertices}
    images[v] = MonoidExpr.sum(MonoidExpr.gen(e.dst, 1) for e in g.out_edges[v])
    back = GeneratorMap(f, g, {u: MonoidExpr.gen(u) for u in f.vertices})
    fwd = GeneratorMap(g, f, images, back, "source-removal")
    back.inverse = fwd
    return fwd


def induced_map_in_split(g: Graph, f: Graph, plan: SplitPlan) -> GeneratorMap:
    _check_pair(g, f, move_in_split(g, plan), "in-split")
    images, back = {}, {}
    for v in g.vertices:
        m = len(plan.partition(g, v))
        if m:
            images[v] = MonoidExpr.gen(in_name(v, 1))
            for i in range(1, m + 1):
                back[in_name(v, i)] = MonoidExpr.gen(v)
        else:
            images[v] = back[v] = MonoidExpr.gen(v)
    inv = GeneratorMap(f, g, back)
    fwd = GeneratorMap(g, f, images, inv, "in-split")
    inv.inverse = fwd
    return fwd


def induced_map_out_split(g: Graph, f: Graph, plan: SplitPlan) -> GeneratorMap:
    _check_pair(g, f, move_out_split(g, plan), "out-split")
    edge = g.edge_index
    images, back = {}, {}
    for v in g.vertices:
        blocks = plan.partition(g, v)
        if blocks:
            images[v] = MonoidExpr.sum(MonoidExpr.gen(out_name(v, i))
                                       for i in range(1, len(blocks) + 1))
            for i, b in enumerate(blocks, start=1):
                back[out_name(v, i)] = MonoidExpr.sum(MonoidExpr.gen(edge[eid].dst, 1) for eid in b)
        else:
            images[v] = back[v] = MonoidExpr.gen(v)
    inv = GeneratorMap(f, g, back)
    fwd = GeneratorMap(g, f, images, inv, "out-split")
    inv.inverse = fwd
    return fwd


# -- verification --

@dataclass(frozen=True)
class MapVerification:
    well_defined: Tri
    inverse_ok: Tri
    graph_monoid_disagreements: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        def tri(t: Tri) -> dict:
            return {"verdict": t.verdict.value, "certificate": t.certificate}
        return {"well_defined": tri(self.well_defined), "inverse_ok": tri(self.inverse_ok),
                "graph_monoid_disagreements": [list(p) for p in self.graph_monoid_disagreements]}


def _relations_respected(mp: GeneratorMap, levels: range) -> Tri:
    g, f = mp.domain, mp.codomain
    for v in g.vertices:
        outs = g.out_edges[v]
        if not outs:
            continue
        for i in levels:
            lhs = mp.apply(MonoidExpr.gen(v, i))
            rhs = mp.apply(MonoidExpr.sum(MonoidExpr.gen(e.dst, i + 1) for e in outs))
            if not eq_talented(f, lhs, rhs):
                return NO(vertex=v, level=i, image=str(lhs), relation_image=str(rhs))
    return YES(levels=[levels.start, levels.stop - 1])


def _round_trip(mp: GeneratorMap, levels: range) -> Tri:
    inv = mp.inverse
    g = mp.domain
    for v in g.vertices:
        for i in levels:
            x = MonoidExpr.gen(v, i)
            back = inv.apply(mp.apply(x))
            if not eq_talented(g, back, x):
                return NO(generator=str(x), round_trip=str(back))
    return YES()


def graph_monoid_disagreements(mp: GeneratorMap, cap: int = 2_000) -> list[tuple[str, str]]:
    """Vertex pairs whose equality in the domain graph monoid differs from that of their images."""
    g, f = mp.domain, mp.codomain
    out = []
    vs = g.vertices
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            u, w = vs[a], vs[b]
            here = eq_graph_monoid(g, {u: 1}, {w: 1}, cap)
            if here.unknown:
                continue
            there = eq_graph_monoid(f, mp.images[u], mp.images[w], cap)
            if not there.unknown and here.yes != there.yes:
                out.append((u, w))
    return out


def verify_map(mp: GeneratorMap, window: tuple[int, int] | None = None,
               graph_monoid: bool = True, cap: int = 2_000) -> MapVerification:
    """Check relations and round trips on generators with levels in ``window``.

    ``well_defined`` covers the forward map; ``inverse_ok`` covers the inverse
    map's relations, both round trips, and agreement of graph-monoid
    equalities between vertex generators.
    """
    if window is None:
        window = (0, len(mp.domain.vertices) + 2)
    lo, hi = window
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    levels = range(lo, hi + 1)
    wd = _relations_respected(mp, levels)
    disagreements = tuple(graph_monoid_disagreements(mp, cap)) if graph_monoid else ()
    inv = mp.inverse
    if inv is None:
        inverse_ok = UNKNOWN(reason="no inverse supplied")
    else:
        inverse_ok = _relations_respected(inv, levels)
        if inverse_ok.yes:
            inverse_ok = _round_trip(mp, levels)
        if inverse_ok.yes:
            inverse_ok = _round_trip(inv, levels)
        if inverse_ok.yes and disagreements:
            u, w = disagreements[0]
            inverse_ok = NO(reason="graph monoid equality not preserved", pair=[u, w])
    return MapVerification(wd, inverse_ok, disagreements)
