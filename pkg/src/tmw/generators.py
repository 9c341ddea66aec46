"""Graph families for sweeps: exhaustive small multigraphs up to isomorphism, and random ones."""

from __future__ import annotations

import random
from itertools import permutations
from typing import Iterator

import numpy as np

from .graph import Edge, Graph
from .moves import SplitPlan


def _perm_tables(n: int, base: int) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """For each vertex permutation ``p``, a table taking a row code to its column-permuted code."""
    rows = np.arange(base ** n, dtype=np.int64)
    digits = [(rows // base ** j) % base for j in range(n)]
    out = []
    for p in permutations(range(n)):
        table = sum(digits[p[j]] * base ** j for j in range(n))
        out.append((p, table.astype(np.int64)))
    return out


def canonical_codes(n: int, max_mult: int = 2, chunk: int = 1 << 20) -> np.ndarray:
    """Codes of the lexicographically least matrix in each isomorphism class.

    A matrix ``A`` (entries ``0..max_mult``) is coded as ``sum A[i][j] * b**(n*i + j)``
    with ``b = max_mult + 1``; relabelling by ``p`` sends it to ``A[p[i]][p[j]]``.
    """
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    base = max_mult + 1
    row_base = base ** n
    total = row_base ** n
    tables = _perm_tables(n, base)
    keep = []
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        rows = [(codes // row_base ** i) % row_base for i in range(n)]
        for p, table in tables:
            permuted = np.zeros_like(codes)
            for i in range(n):
                permuted += table[rows[p[i]]] * row_base ** i
            mask = codes <= permuted
            if not mask.all():
                codes = codes[mask]
                rows = [r[mask] for r in rows]
        keep.append(codes)
    return np.concatenate(keep)


def decode(code: int, n: int, max_mult: int = 2) -> tuple[tuple[int, ...], ...]:
    base = max_mult + 1
    code = int(code)
    flat = []
    for _ in range(n * n):
        code, d = divmod(code, base)
        flat.append(d)
    return tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))


def decode_all(codes: np.ndarray, n: int, max_mult: int = 2) -> np.ndarray:
    """Vectorised :func:`decode`: shape ``(len(codes), n, n)``."""
    base = max_mult + 1
    digits = (codes[:, None] // base ** np.arange(n * n, dtype=np.int64)[None, :]) % base
    return digits.reshape(len(codes), n, n)


def small_multigraphs(max_n: int, max_mult: int = 2, min_n: int = 1) -> Iterator[Graph]:
    """One graph per isomorphism class, ``min_n..max_n`` vertices."""
    for n in range(min_n, max_n + 1):
        for code in canonical_codes(n, max_mult):
            yield Graph.from_matrix(decode(code, n, max_mult))


# -- random families --

def _add_edges(edges: list[tuple[int, int]], names: list[str]) -> Graph:
    counter: dict[tuple[int, int], int] = {}
    out = []
    for a, b in edges:
        k = counter.get((a, b), 0)
        counter[(a, b)] = k + 1
        out.append(Edge(f"e{a}_{b}_{k}", names[a], names[b]))
    return Graph(tuple(names), tuple(out))


def random_graph(rng: random.Random, n: int, max_mult: int = 2, p: float = 0.35) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(n)
             for _ in range(rng.randint(1, max_mult)) if rng.random() < p]
    return _add_edges(edges, [f"v{i}" for i in range(n)])


def random_sink_free(rng: random.Random, n: int, max_mult: int = 2, p: float = 0.3) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(n)
             for _ in range(rng.randint(1, max_mult)) if rng.random() < p]
    for i in range(n):
        if not any(a == i for a, _ in edges):
            edges.append((i, rng.randrange(n)))
    return _add_edges(edges, [f"v{i}" for i in range(n)])


def random_strongly_connected(rng: random.Random, n: int, max_mult: int = 2,
                              p: float = 0.2) -> Graph:
    """A random Hamiltonian cycle plus random extra edges."""
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[k], order[(k + 1) % n]) for k in range(n)]
    edges += [(i, j) for i in range(n) for j in range(n)
              for _ in range(rng.randint(1, max_mult)) if rng.random() < p]
    return _add_edges(edges, [f"v{i}" for i in range(n)])


def random_periodic(rng: random.Random, n: int, d: int, p: float = 0.3) -> Graph:
    """Strongly connected graph whose edges only go from layer ``k`` to layer ``k+1 mod d``."""
    d = max(1, min(d, n))
    layer = list(range(d)) + [rng.randrange(d) for _ in range(n - d)]
    rng.shuffle(layer)
    members = [[v for v in range(n) if layer[v] == k] for k in range(d)]
    rounds = max(len(m) for m in members)
    walk = [members[k][r % len(members[k])] for r in range(rounds) for k in range(d)]
    edges = [(walk[t], walk[(t + 1) % len(walk)]) for t in range(len(walk))]
    edges += [(a, b) for a in range(n) for b in range(n)
              if layer[b] == (layer[a] + 1) % d and rng.random() < p]
    return _add_edges(edges, [f"v{i}" for i in range(n)])


def with_regular_source(rng: random.Random, g: Graph, name: str = "src") -> Graph:
    """Add a fresh vertex with edges into ``g`` and none coming back."""
    k = rng.randint(1, 3)
    targets = [rng.choice(g.vertices) for _ in range(k)]
    edges = list(g.edges) + [Edge(f"{name}_e{i}", name, t) for i, t in enumerate(targets)]
    return Graph(g.vertices + (name,), tuple(edges))


def random_plan(rng: random.Random, g: Graph, kind: str) -> SplitPlan:
    blocks = {}
    for v in g.vertices:
        edges = g.in_edges[v] if kind == "in" else g.out_edges[v]
        if len(edges) < 2 or rng.random() < 0.3:
            continue
        k = rng.randint(1, len(edges))
        parts: list[list[str]] = [[] for _ in range(k)]
        for e in edges:
            parts[rng.randrange(k)].append(e.id)
        blocks[v] = [b for b in parts if b]
    return SplitPlan(kind, blocks)
