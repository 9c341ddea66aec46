import random

import pytest

from tmw import Graph, eq_graph_monoid, leq_graph_monoid, parse_expr
from tmw.graph_monoid import trapped_vertices

from conftest import load


def test_merge_examples():
    e = load("merge.txt")
    assert eq_graph_monoid(e, {"a": 1}, {"b": 1}).yes
    f = Graph(("a", "b", "c", "d"), (("x", "a", "b"), ("y", "d", "c")))
    assert eq_graph_monoid(f, {"a": 1}, {"d": 1}).no


def test_eq_reflexive_and_levels_forgotten():
    g = load("rose2.txt")
    assert eq_graph_monoid(g, {"v": 3}, {"v": 3}).yes
    assert eq_graph_monoid(g, parse_expr("v(4)"), parse_expr("v")).yes
    assert eq_graph_monoid(g, {"v": 1}, {"v": 2}).yes


def test_eq_bare_cycle_sizes_differ():
    c3 = load("cycle3.txt")
    assert eq_graph_monoid(c3, {"x": 1}, {"y": 1}).yes
    assert eq_graph_monoid(c3, {"x": 1}, {"x": 2}).no


def test_eq_cap_and_validation():
    g = load("rose2.txt")
    with pytest.raises(ValueError):
        eq_graph_monoid(g, {"v": 1}, {"v": 1}, 0)
    with pytest.raises(KeyError):
        eq_graph_monoid(g, {"q": 1}, {"v": 1})
    # two unrelated exponential growers: the search can only give up
    h = Graph.from_matrix([[2, 0], [0, 3]])
    r = eq_graph_monoid(h, {"v0": 1}, {"v1": 1}, 50)
    assert r.no  # neither reaches the other: trapped certificate


def test_leq_basic():
    g = load("two_loops.txt")
    assert leq_graph_monoid(g, {"a": 1}, {"b": 1}).yes
    assert leq_graph_monoid(g, {"a": 5}, {"b": 1}).yes
    c3 = load("cycle3.txt")
    assert leq_graph_monoid(c3, {"x": 2}, {"x": 1}).no
    assert leq_graph_monoid(c3, {"x": 1}, {"y": 1}).yes


def test_trapped_vertices():
    g = load("mixed.txt")
    y = 1 << g.index["v1"]
    trapped = trapped_vertices(g, y)
    names = {v for i, v in enumerate(g.vertices) if trapped >> i & 1}
    assert names == {"v2", "v3", "v4"}


def _bfs_closure(g, start, max_size=7):
    rows = {v: [e.dst for e in g.edges if e.src == v] for v in g.vertices}
    start = tuple(sorted(start))
    seen, stack = {start}, [start]
    while stack:
        cur = stack.pop()
        for i, v in enumerate(cur):
            if rows[v] and len(cur) - 1 + len(rows[v]) <= max_size:
                nxt = tuple(sorted(cur[:i] + cur[i + 1:] + tuple(rows[v])))
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


def test_eq_yes_matches_bounded_closure_intersection():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(1, 4)
        g = Graph.from_matrix([[rng.choice((0, 0, 1)) for _ in range(n)] for _ in range(n)])
        u, w = rng.choice(g.vertices), rng.choice(g.vertices)
        meet = bool(_bfs_closure(g, (u,)) & _bfs_closure(g, (w,)))
        r = eq_graph_monoid(g, {u: 1}, {w: 1}, 5000)
        if meet:
            assert r.yes
        if r.no:
            assert not meet
