"""Reference computations that share no code with the library's deciders."""

from __future__ import annotations

from collections import deque
from itertools import permutations
from math import gcd

import numpy as np


def adjacency(g) -> np.ndarray:
    idx = {v: i for i, v in enumerate(g.vertices)}
    a = np.zeros((len(g.vertices), len(g.vertices)), dtype=np.int64)
    for e in g.edges:
        a[idx[e.src], idx[e.dst]] += 1
    return a


def reach_by_powers(g) -> np.ndarray:
    """Reflexive-transitive closure as a boolean matrix, from powers of (I + A)."""
    n = len(g.vertices)
    m = ((np.eye(n, dtype=np.int64) + adjacency(g)) > 0).astype(np.int64)
    r = m.copy()
    for _ in range(n):
        r = ((r @ m) > 0).astype(np.int64)
    return r.astype(bool)


def period_by_powers(g, v: str) -> int:
    """gcd of all k up to n^2 + 3n with a closed path of length k at v."""
    n = len(g.vertices)
    i = g.vertices.index(v)
    a = (adjacency(g) > 0).astype(np.int64)
    p = np.eye(n, dtype=np.int64)
    d = 0
    for k in range(1, n * n + 3 * n + 1):
        p = ((p @ a) > 0).astype(np.int64)
        if p[i, i]:
            d = gcd(d, k)
    return d


def group_oracle_batch(mats: np.ndarray) -> np.ndarray:
    """Strongly connected and some vertex emits two edges, for a stack of count matrices.

    A strongly connected graph where every vertex emits exactly one edge is a
    single bare cycle; any other strongly connected graph has a cycle exit.
    """
    k, n, _ = mats.shape
    step = (mats > 0) | np.eye(n, dtype=bool)[None]
    reach = step.copy()
    for _ in range(n):
        reach = np.einsum("kij,kjl->kil", reach.astype(np.int64), step.astype(np.int64)) > 0
    sc = reach.all(axis=(1, 2))
    return sc & (mats.sum(axis=2) >= 2).any(axis=1)


def burnside_count(n: int, values: int) -> int:
    """Number of n-vertex matrices over ``values`` symbols up to simultaneous relabelling."""
    total = 0
    perms = list(permutations(range(n)))
    for p in perms:
        seen = set()
        cycles = 0
        for cell in ((i, j) for i in range(n) for j in range(n)):
            if cell in seen:
                continue
            cycles += 1
            c = cell
            while c not in seen:
                seen.add(c)
                c = (p[c[0]], p[c[1]])
        total += values ** cycles
    return total // len(perms)


def lattice_equal(g, x, y, extra: int | None = None) -> bool:
    """Is x - y an integer combination of the defining relations on a level window?

    Coordinates are (vertex, level).  Each relation ``v(i) - sum r(e)(i+1)``
    has a unit coefficient at (v, i) and otherwise only touches level i + 1,
    so eliminating from the lowest level upward decides membership exactly.
    The monoid is cancellative, hence equality is membership in this lattice.
    """
    n = len(g.vertices)
    levels = [lvl for (_, lvl) in list(x.terms) + list(y.terms)] or [0]
    lo, hi = min(levels), max(levels) + (extra if extra is not None else 2 * n + 2)
    t: dict = {}
    for key, k in x.terms.items():
        t[key] = t.get(key, 0) + k
    for key, k in y.terms.items():
        t[key] = t.get(key, 0) - k
    outs = {v: [e.dst for e in g.edges if e.src == v] for v in g.vertices}
    for lvl in range(lo, hi):
        for v in g.vertices:
            c = t.get((v, lvl), 0)
            if not c or not outs[v]:
                continue
            t[(v, lvl)] = 0
            for w in outs[v]:
                t[(w, lvl + 1)] = t.get((w, lvl + 1), 0) + c
    return not any(t.values())


def rewrite_closure_equal(g, x, y, max_size: int = 8, max_nodes: int = 4000) -> bool | None:
    """Undirected rewriting search: expand or contract one generator at a time.

    Returns True when y is reached, False when the bounded universe is
    exhausted, None when the node budget runs out.
    """
    outs = {v: tuple(sorted(e.dst for e in g.edges if e.src == v)) for v in g.vertices}
    lv = [lvl for (_, lvl) in list(x.terms) + list(y.terms)] or [0]
    lo, hi = min(lv), max(lv) + len(g.vertices) + 1

    def key(terms):
        return tuple(sorted((k, m) for k, m in terms.items() if m))

    start, goal = key(x.terms), key(y.terms)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            return True
        terms = dict(cur)
        size = sum(terms.values())
        nbrs = []
        for (v, lvl), m in cur:
            if outs[v] and lvl < hi and size - 1 + len(outs[v]) <= max_size:
                nxt = dict(terms)
                nxt[(v, lvl)] -= 1
                for w in outs[v]:
                    nxt[(w, lvl + 1)] = nxt.get((w, lvl + 1), 0) + 1
                nbrs.append(key(nxt))
        for v, targets in outs.items():
            if not targets:
                continue
            for lvl in range(lo, hi):
                need: dict = {}
                for w in targets:
                    need[(w, lvl + 1)] = need.get((w, lvl + 1), 0) + 1
                if all(terms.get(k, 0) >= m for k, m in need.items()):
                    nxt = dict(terms)
                    for k, m in need.items():
                        nxt[k] -= m
                    nxt[(v, lvl)] = nxt.get((v, lvl), 0) + 1
                    nbrs.append(key(nxt))
        for nb in nbrs:
            if nb not in seen:
                seen.add(nb)
                if len(seen) > max_nodes:
                    return None
                queue.append(nb)
    return False
