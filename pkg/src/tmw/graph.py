"""Finite directed multigraphs and the graph-theoretic primitives used everywhere else.

A :class:`Graph` is immutable once built.  Vertex and edge identifiers are
arbitrary strings; their declaration order is the canonical order used in
every report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence


class GraphFormatError(ValueError):
    """Raised for malformed graph descriptions.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HypothesisError(ValueError):
    """A graph fails the preconditions an operation is only defined under."""


class Edge(NamedTuple):
    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise GraphFormatError(f"duplicate vertex {v!r}")
            seen.add(v)
        eids = set()
        for e in self.edges:
            if e.id in eids or e.id in seen:
                raise GraphFormatError(f"duplicate identifier {e.id!r}")
            eids.add(e.id)
            for end in (e.src, e.dst):
                if end not in seen:
                    raise GraphFormatError(
                        f"edge {e.id!r} references undeclared vertex {end!r}")

    @classmethod
    def from_matrix(cls, counts: Sequence[Sequence[int]],
                    names: Sequence[str] | None = None) -> "Graph":
        """Build a graph from an edge-multiplicity matrix ``counts[i][j]``."""
        n = len(counts)
        names = list(names) if names is not None else [f"v{i}" for i in range(n)]
        edges = []
        for i in range(n):
            for j in range(n):
                for k in range(counts[i][j]):
                    edges.append(Edge(f"e{i}_{j}_{k}", names[i], names[j]))
        return cls(tuple(names), tuple(edges))

    # -- derived structure (cached; the graph never changes) --

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.dst].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """Edge multiplicities indexed by declaration position."""
        n = len(self.vertices)
        rows = [[0] * n for _ in range(n)]
        idx = self.index
        for e in self.edges:
            rows[idx[e.src]][idx[e.dst]] += 1
        return tuple(tuple(r) for r in rows)

    @cached_property
    def succ_mask(self) -> tuple[int, ...]:
        masks = [0] * len(self.vertices)
        idx = self.index
        for e in self.edges:
            masks[idx[e.src]] |= 1 << idx[e.dst]
        return tuple(masks)

    @cached_property
    def reach_mask(self) -> tuple[int, ...]:
        """Bitmask of vertices each vertex flows to (reflexive)."""
        succ = self.succ_mask
        n = len(succ)
        reach = [(1 << i) | succ[i] for i in range(n)]
        changed = True
        while changed:
            changed = False
            for i in range(n):
                r = reach[i]
                acc = r
                m = r
                while m:
                    low = m & -m
                    acc |= reach[low.bit_length() - 1]
                    m ^= low
                if acc != r:
                    reach[i] = acc
                    changed = True
        return tuple(reach)

    def out_degree(self, v: str) -> int:
        return len(self.out_edges[v])

    def is_sink(self, v: str) -> bool:
        return not self.out_edges[v]

    def __len__(self) -> int:
        return len(self.vertices)

    def subgraph(self, keep: Iterable[str]) -> "Graph":
        """Restriction to ``keep``: drops every edge touching a removed vertex."""
        keep = set(keep)
        return Graph(tuple(v for v in self.vertices if v in keep),
                     tuple(e for e in self.edges if e.src in keep and e.dst in keep))


# -- text / JSON formats --

def parse_graph(text: str) -> Graph:
    """Parse the line format (``vertex <id>`` / ``edge <id> <src> <dst>``) or its JSON twin."""
    if text.lstrip().startswith("{"):
        return graph_from_json(text)
    vertices: list[str] = []
    edges: list[Edge] = []
    names: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "vertex":
            if len(parts) != 2:
                raise GraphFormatError("expected 'vertex <id>'", lineno)
            ident = parts[1]
            if ident in names:
                raise GraphFormatError(f"duplicate identifier {ident!r}", lineno)
            names[ident] = lineno
            vertices.append(ident)
        elif kind == "edge":
            if len(parts) != 4:
                raise GraphFormatError("expected 'edge <id> <src> <dst>'", lineno)
            ident, src, dst = parts[1:]
            if ident in names:
                raise GraphFormatError(f"duplicate identifier {ident!r}", lineno)
            names[ident] = lineno
            edges.append((Edge(ident, src, dst), lineno))
        else:
            raise GraphFormatError(f"unknown directive {kind!r}", lineno)
    declared = set(vertices)
    for e, lineno in edges:
        for end in (e.src, e.dst):
            if end not in declared:
                raise GraphFormatError(
                    f"edge {e.id!r} references undeclared vertex {end!r}", lineno)
    return Graph(tuple(vertices), tuple(e for e, _ in edges))


def format_graph(g: Graph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.id} {e.src} {e.dst}" for e in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_dict(g: Graph) -> dict:
    return {
        "schema": 1,
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "src": e.src, "dst": e.dst} for e in g.edges],
    }


def graph_from_json(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    try:
        vertices = [str(v) for v in data["vertices"]]
        edges = [Edge(str(e["id"]), str(e["src"]), str(e["dst"]))
                 for e in data.get("edges", [])]
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"malformed graph JSON: {exc}") from None
    return Graph(tuple(vertices), tuple(edges))


# -- primitives --

def sinks(g: Graph) -> set[str]:
    return {v for v in g.vertices if not g.out_edges[v]}


def sources(g: Graph) -> set[str]:
    return {v for v in g.vertices if not g.in_edges[v]}


def regular_sources(g: Graph) -> set[str]:
    return sources(g) - sinks(g)


def reaches(g: Graph, u: str, v: str) -> bool:
    idx = g.index
    if u not in idx or v not in idx:
        raise KeyError(f"unknown vertex {u if u not in idx else v!r}")
    return bool(g.reach_mask[idx[u]] >> idx[v] & 1)


def descendants(g: Graph, vs: Iterable[str]) -> set[str]:
    mask = 0
    for v in vs:
        mask |= g.reach_mask[g.index[v]]
    return {v for i, v in enumerate(g.vertices) if mask >> i & 1}


@dataclass(frozen=True)
class Condensation:
    """Strongly connected components and the DAG between them.

    Components are listed in order of their earliest-declared vertex, and
    members inside a component keep declaration order.
    """
    components: tuple[tuple[str, ...], ...]
    component_of: dict[str, int] = field(compare=False)
    dag_edges: frozenset[tuple[int, int]]
    trivial: tuple[bool, ...]

    @property
    def terminal(self) -> tuple[bool, ...]:
        out = [True] * len(self.components)
        for a, _ in self.dag_edges:
            out[a] = False
        return tuple(out)

    @property
    def nontrivial(self) -> list[int]:
        return [i for i, t in enumerate(self.trivial) if not t]


def _tarjan(n: int, adj: Sequence[Sequence[int]]) -> list[list[int]]:
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            nbrs = adj[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                w = nbrs[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def scc(g: Graph) -> Condensation:
    cached = g.__dict__.get("_condensation")
    if cached is not None:
        return cached
    n = len(g.vertices)
    idx = g.index
    adj: list[list[int]] = [[] for _ in range(n)]
    loops = [False] * n
    for e in g.edges:
        a, b = idx[e.src], idx[e.dst]
        adj[a].append(b)
        if a == b:
            loops[a] = True
    raw = sorted((sorted(c) for c in _tarjan(n, adj)), key=lambda c: c[0])
    comp_idx = [0] * n
    for ci, comp in enumerate(raw):
        for i in comp:
            comp_idx[i] = ci
    dag = set()
    for e in g.edges:
        a, b = comp_idx[idx[e.src]], comp_idx[idx[e.dst]]
        if a != b:
            dag.add((a, b))
    names = g.vertices
    cond = Condensation(
        components=tuple(tuple(names[i] for i in comp) for comp in raw),
        component_of={names[i]: comp_idx[i] for i in range(n)},
        dag_edges=frozenset(dag),
        trivial=tuple(len(c) == 1 and not loops[c[0]] for c in raw),
    )
    g.__dict__["_condensation"] = cond
    return cond


def is_strongly_connected(g: Graph) -> bool:
    if not g.vertices:
        return False
    full = (1 << len(g.vertices)) - 1
    return all(m == full for m in g.reach_mask)


@dataclass(frozen=True)
class CoveringWindow:
    """Finite slab ``[lo, hi]`` of the covering graph: ``(e, i)`` runs from ``(s(e), i)`` to ``(r(e), i+1)``."""
    base: Graph
    lo: int
    hi: int
    vertices: tuple[tuple[str, int], ...]
    edges: tuple[tuple[tuple[str, int], tuple[str, int], tuple[str, int]], ...]


def covering_window(g: Graph, lo: int, hi: int) -> CoveringWindow:
    if lo > hi:
        raise ValueError(f"empty level range [{lo}, {hi}]")
    verts = tuple((v, i) for i in range(lo, hi + 1) for v in g.vertices)
    edges = tuple(((e.id, i), (e.src, i), (e.dst, i + 1))
                  for i in range(lo, hi) for e in g.edges)
    return CoveringWindow(g, lo, hi, verts, edges)
