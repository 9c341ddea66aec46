import json

import pytest
from hypothesis import given, settings, strategies as st

from tmw import (Graph, GraphFormatError, covering_window, format_graph, graph_to_dict,
                 parse_graph, reaches, regular_sources, scc, sinks, sources)
from tmw.graph import descendants, graph_from_json, is_strongly_connected

from conftest import load
from oracles import reach_by_powers

PATH = parse_graph("vertex a\nvertex b\nvertex c\nedge p a b\nedge q b c\n")


def test_parse_rose():
    g = parse_graph("vertex v\nedge e v v\nedge f v v")
    assert g.vertices == ("v",)
    assert [e.id for e in g.edges] == ["e", "f"]


def test_parse_two_loops_fixture():
    g = load("two_loops.txt")
    assert len(g.vertices) == 2 and len(g.edges) == 3


def test_parse_comments_and_blank_lines():
    g = parse_graph("# header\n\nvertex a  # trailing\n\nedge e a a\n")
    assert g.vertices == ("a",) and len(g.edges) == 1


@pytest.mark.parametrize("text, line, fragment", [
    ("edge e a b", 1, "undeclared"),
    ("vertex a\nvertex a", 2, "duplicate"),
    ("vertex a\nedge a a a", 2, "duplicate"),
    ("vertex a\nloop a", 2, "unknown directive"),
    ("vertex a b", 1, "expected"),
    ("vertex a\nedge e a", 2, "expected"),
])
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_json_round_trip_and_errors():
    g = load("mixed.txt")
    text = json.dumps(graph_to_dict(g))
    assert parse_graph(text) == g
    with pytest.raises(GraphFormatError):
        graph_from_json('{"vertices": ["a"], "edges": [{"id": "e", "src": "a"}]}')
    with pytest.raises(GraphFormatError):
        graph_from_json('{"vertices": ')


def test_sinks_sources():
    assert sinks(PATH) == {"c"} and sources(PATH) == {"a"}
    rose = load("rose2.txt")
    assert sinks(rose) == set() and sources(rose) == set()
    lone = Graph(("v",))
    assert sinks(lone) == sources(lone) == {"v"}
    assert regular_sources(lone) == set()


def test_scc_examples():
    assert scc(load("path3.txt")).components == (("u1", "u2", "u3"),)
    cond = scc(load("mixed.txt"))
    nontrivial = [cond.components[i] for i in cond.nontrivial]
    assert nontrivial == [("v1",), ("v2", "v3"), ("v4",)]
    assert all(scc(PATH).trivial)


def test_reaches():
    assert reaches(PATH, "a", "c") and not reaches(PATH, "c", "a")
    assert reaches(load("rose2.txt"), "v", "v")
    with pytest.raises(KeyError):
        reaches(PATH, "a", "zz")
    assert descendants(PATH, ["b"]) == {"b", "c"}


def test_covering_window_examples():
    w = covering_window(load("rose2.txt"), 0, 1)
    assert len(w.vertices) == 2 and len(w.edges) == 2
    assert all(src == ("v", 0) and dst == ("v", 1) for _, src, dst in w.edges)
    w = covering_window(Graph(("v",)), -1, 1)
    assert len(w.vertices) == 3 and not w.edges
    w = covering_window(parse_graph("vertex a\nvertex b\nedge e a b"), 0, 2)
    assert {e for e, _, _ in w.edges} == {("e", 0), ("e", 1)}
    with pytest.raises(ValueError):
        covering_window(PATH, 2, 1)


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    counts = draw(st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n),
                           min_size=n, max_size=n))
    return Graph.from_matrix(counts)


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_graph_invariants(g):
    outgoing = {e.src for e in g.edges}
    incoming = {e.dst for e in g.edges}
    assert not sinks(g) & outgoing and not sources(g) & incoming
    cond = scc(g)
    # condensation is acyclic: a topological order exists
    remaining = set(range(len(cond.components)))
    dag = set(cond.dag_edges)
    while remaining:
        free = [c for c in remaining if not any(a in remaining and b == c for a, b in dag)]
        assert free
        remaining -= set(free)
    lo, hi = -1, 2
    w = covering_window(g, lo, hi)
    assert len(w.vertices) == (hi - lo + 1) * len(g.vertices)
    assert len(w.edges) == (hi - lo) * len(g.edges)
    r = reach_by_powers(g)
    for i, u in enumerate(g.vertices):
        for j, v in enumerate(g.vertices):
            assert reaches(g, u, v) == bool(r[i, j])
    assert is_strongly_connected(g) == bool(r.all())
    assert parse_graph(format_graph(g)) == g
