"""Graph invariants: period, decomposition, cycle taxonomy, primary colours, classification.

Verdicts here are computed on the graph and are exact.  Monoid-side checks
(window decomposition, extreme/no-exit witnesses) are attached as evidence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable

from .expr import NO, UNKNOWN, YES, MonoidExpr, Tri
from .flow import _Run, eq_talented, lt_talented
from .graph import (Graph, HypothesisError, is_strongly_connected, regular_sources,
                    scc, sources)
from .graph_monoid import DEFAULT_LEQ_CAP, leq_graph_monoid

NO_EXIT = "single-cycle-no-exit"
EXTREME = "extreme"
NO_RETURN_EXIT = "single-cycle-no-return-exit"
MIXED = "mixed-non-terminal"


def _ordered(g: Graph, vs: Iterable[str]) -> list[str]:
    idx = g.index
    return sorted(vs, key=idx.__getitem__)


def _component_depths(g: Graph, v: str) -> tuple[set[str], dict[str, int]]:
    comp = set(scc(g).components[scc(g).component_of[v]])
    depth = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for e in g.out_edges[u]:
            if e.dst in comp and e.dst not in depth:
                depth[e.dst] = depth[u] + 1
                queue.append(e.dst)
    return comp, depth


def period_of_vertex(g: Graph, v: str) -> int:
    """gcd of the lengths of closed paths at ``v``; 0 when ``v`` lies on none."""
    if v not in g.index:
        raise KeyError(f"unknown vertex {v!r}")
    cond = scc(g)
    if cond.trivial[cond.component_of[v]]:
        return 0
    comp, depth = _component_depths(g, v)
    d = 0
    for e in g.edges:
        if e.src in comp and e.dst in comp:
            d = gcd(d, depth[e.src] + 1 - depth[e.dst])
    return abs(d)


def period_of_graph(g: Graph) -> int:
    if not g.edges or not is_strongly_connected(g):
        raise HypothesisError("period_of_graph needs a strongly connected graph with an edge")
    periods = {period_of_vertex(g, v) for v in g.vertices}
    if len(periods) != 1:
        raise RuntimeError(f"vertex periods disagree: {sorted(periods)}")
    return periods.pop()


def condition_L(g: Graph) -> bool:
    return not any(e.kind == NO_EXIT for e in classify_cycles(g).entries)


@dataclass(frozen=True)
class SccEntry:
    kind: str
    vertices: tuple[str, ...]
    cycle: tuple[str, ...]
    period: int

    @property
    def witness(self) -> tuple[str, int]:
        """A cycle vertex and the cycle length: the shift used by monoid-side checks."""
        return self.vertices[0], len(self.cycle)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vertices": list(self.vertices),
                "cycle": list(self.cycle), "period": self.period}


@dataclass(frozen=True)
class CycleTaxonomy:
    entries: tuple[SccEntry, ...]

    def of_kind(self, kind: str) -> list[SccEntry]:
        return [e for e in self.entries if e.kind == kind]

    def counts(self) -> dict[str, int]:
        out = {k: 0 for k in (NO_EXIT, EXTREME, NO_RETURN_EXIT, MIXED)}
        for e in self.entries:
            out[e.kind] += 1
        return out


def _shortest_cycle(g: Graph, start: str, comp: set[str]) -> tuple[str, ...]:
    prev: dict[str, tuple[str, str]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        u = queue.popleft()
        for e in g.out_edges[u]:
            if e.dst == start:
                path = [e.id]
                w = u
                while w != start:
                    p, eid = prev[w]
                    path.append(eid)
                    w = p
                return tuple(reversed(path))
            if e.dst in comp and e.dst not in seen:
                seen.add(e.dst)
                prev[e.dst] = (u, e.id)
                queue.append(e.dst)
    raise RuntimeError(f"no cycle through {start!r}")


def classify_cycles(g: Graph) -> CycleTaxonomy:
    cached = g.__dict__.get("_taxonomy")
    if cached is not None:
        return cached
    cond = scc(g)
    terminal = cond.terminal
    entries = []
    for ci in cond.nontrivial:
        members = cond.components[ci]
        comp = set(members)
        bare = all(sum(1 for e in g.out_edges[v] if e.dst in comp) == 1 for v in members)
        if bare:
            kind = NO_EXIT if terminal[ci] else NO_RETURN_EXIT
        else:
            kind = EXTREME if terminal[ci] else MIXED
        cycle = _shortest_cycle(g, members[0], comp)
        entries.append(SccEntry(kind, members, cycle, period_of_vertex(g, members[0])))
    tax = CycleTaxonomy(tuple(entries))
    g.__dict__["_taxonomy"] = tax
    return tax


def line_points(g: Graph) -> set[str]:
    cond = scc(g)
    bad = 0
    for i, v in enumerate(g.vertices):
        if len(g.out_edges[v]) > 1 or not cond.trivial[cond.component_of[v]]:
            bad |= 1 << i
    return {v for i, v in enumerate(g.vertices) if not g.reach_mask[i] & bad}


@dataclass(frozen=True)
class PrimaryColours:
    P_l: tuple[str, ...]
    P_c: tuple[str, ...]
    P_ec: tuple[str, ...]
    gamma_l: tuple[tuple[str, ...], ...]
    gamma_c: tuple[tuple[str, ...], ...]
    gamma_ec: tuple[tuple[str, ...], ...]

    @property
    def P_lce(self) -> tuple[str, ...]:
        return self.P_l + self.P_c + self.P_ec


def primary_colours(g: Graph) -> PrimaryColours:
    tax = classify_cycles(g)
    p_l = set(line_points(g))
    p_c = {v for e in tax.of_kind(NO_EXIT) for v in e.vertices}
    p_ec = {v for e in tax.of_kind(EXTREME) for v in e.vertices}
    lce = _ordered(g, p_l | p_c | p_ec)
    parent = {v: v for v in lce}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    reach, idx = g.reach_mask, g.index
    for i, v in enumerate(lce):
        for w in lce[i + 1:]:
            if reach[idx[v]] & reach[idx[w]]:
                parent[find(w)] = find(v)
    classes: dict[str, list[str]] = {}
    for v in lce:
        classes.setdefault(find(v), []).append(v)
    groups = {"l": [], "c": [], "ec": []}
    for members in classes.values():
        head = members[0]
        colour = "l" if head in p_l else "c" if head in p_c else "ec"
        groups[colour].append(tuple(members))
    return PrimaryColours(
        tuple(_ordered(g, p_l)), tuple(_ordered(g, p_c)), tuple(_ordered(g, p_ec)),
        tuple(groups["l"]), tuple(groups["c"]), tuple(groups["ec"]))


def is_hereditary(g: Graph, h: Iterable[str]) -> bool:
    h = set(h)
    return all(e.dst in h for v in h for e in g.out_edges[v])


def is_cofinal(g: Graph, h: Iterable[str]) -> bool:
    mask = 0
    for v in h:
        mask |= 1 << g.index[v]
    return all(r & mask for r in g.reach_mask)


def essential_check(g: Graph, h: Iterable[str]) -> bool:
    """Hereditary and cofinal: exactly when the ideal generated by ``h`` is essential."""
    h = set(h)
    return is_hereditary(g, h) and is_cofinal(g, h)


def strongly_connected_component(g: Graph) -> Graph:
    """Strip regular sources repeatedly until none remain."""
    while True:
        drop = regular_sources(g)
        if not drop:
            return g
        g = g.subgraph(v for v in g.vertices if v not in drop)


@dataclass(frozen=True)
class PisVerdict:
    pis: bool
    d: int | None = None


def classify_pis(g: Graph) -> PisVerdict:
    cond = scc(g)
    nontrivial = cond.nontrivial
    if not nontrivial or not condition_L(g):
        return PisVerdict(False)
    idx = g.index
    for comp in nontrivial:
        target = 0
        for v in cond.components[comp]:
            target |= 1 << idx[v]
        if not all(r & target for r in g.reach_mask):
            return PisVerdict(False)
    return PisVerdict(True, period_of_graph(strongly_connected_component(g)))


def _require_no_sources(g: Graph, what: str) -> None:
    if not g.vertices:
        raise HypothesisError(f"{what} needs a nonempty graph")
    if sources(g):
        raise HypothesisError(f"{what} needs a graph without sources; "
                              f"sources: {_ordered(g, sources(g))}")


def _closure(succ: list[int]) -> list[int]:
    n = len(succ)
    reach = [(1 << i) | succ[i] for i in range(n)]
    for k in range(n):
        bit, rk = 1 << k, reach[k]
        for i in range(n):
            if reach[i] & bit:
                reach[i] |= rk
    return reach


def _trapped(succ: list[int], reach: list[int], u: int) -> int:
    trapped = ((1 << len(succ)) - 1) & ~reach[u]
    changed = True
    while changed:
        changed = False
        for i in range(len(succ)):
            if trapped >> i & 1 and succ[i] and not succ[i] & trapped:
                trapped &= ~(1 << i)
                changed = True
    return trapped


def group_check_matrix(counts, names=None, cap: int = DEFAULT_LEQ_CAP) -> Tri:
    """Group check on an edge-multiplicity matrix; see :func:`group_check_graph_monoid`.

    Certificates computed from reachability settle most graphs without
    building a :class:`Graph`; the remaining comparisons fall back to the
    flow search.
    """
    n = len(counts)
    names = list(names) if names is not None else [f"v{i}" for i in range(n)]
    if not n:
        raise HypothesisError("group check needs a nonempty graph")
    succ = [0] * n
    has_in = 0
    for i, row in enumerate(counts):
        for j, m in enumerate(row):
            if m:
                succ[i] |= 1 << j
                has_in |= 1 << j
    if has_in != (1 << n) - 1:
        srcs = [names[j] for j in range(n) if not has_in >> j & 1]
        raise HypothesisError(f"group check needs a graph without sources; sources: {srcs}")
    reach = _closure(succ)
    graph = None
    pending = []
    for u in range(n):
        trapped = None
        for v in range(n):
            if u == v or reach[u] >> v & 1:
                continue
            if trapped is None:
                trapped = _trapped(succ, reach, u)
            if trapped >> v & 1:
                return NO(reason="incomparable", smaller=names[v], larger=names[u],
                          trapped=names[v])
            pending.append((v, u))
    unresolved = []
    for v, u in pending:
        graph = graph or Graph.from_matrix(counts, names)
        r = leq_graph_monoid(graph, {names[v]: 1}, {names[u]: 1}, cap)
        if r.no:
            return NO(reason="incomparable", smaller=names[v], larger=names[u],
                      evidence=r.certificate)
        if r.unknown:
            unresolved.append((v, u))
    pending = unresolved
    for w in range(n):
        back = sum(m for j, m in enumerate(counts[w]) if reach[j] >> w & 1)
        if back >= 2:
            if pending:
                break
            return YES(doubling_vertex=names[w], reason="two returning edges")
    else:
        graph = graph or Graph.from_matrix(counts, names)
        found = False
        for w in range(n):
            r = leq_graph_monoid(graph, {names[w]: 2}, {names[w]: 1}, cap)
            if r.no:
                return NO(reason="not doubling", vertex=names[w], evidence=r.certificate)
            if r.yes:
                found = True
                break
        if found and not pending:
            return YES(doubling_vertex=names[w], evidence=r.certificate)
    return UNKNOWN(reason="cap exhausted",
                   pending=[[names[v], names[u]] for v, u in pending])


def group_check_graph_monoid(g: Graph, cap: int = DEFAULT_LEQ_CAP) -> Tri:
    """Is the graph monoid minus zero a group?

    Requires every pair of vertices comparable in both directions and some
    vertex ``w`` with ``w >= 2w``.
    """
    _require_no_sources(g, "group check")
    return group_check_matrix(g.matrix, g.vertices, cap)


# -- decomposition into shifted copies of a simple order ideal --

@dataclass(frozen=True)
class WindowCheck:
    window: tuple[int, int]
    checked: int
    violations: tuple[tuple[str, int, tuple[int, ...]], ...]
    covered: int
    uncertified: int

    def to_dict(self) -> dict:
        return {"window": list(self.window), "checked": self.checked,
                "violations": [[v, j, list(rs)] for v, j, rs in self.violations],
                "covered": self.covered, "uncertified": self.uncertified}


@dataclass(frozen=True)
class Decomposition:
    d: int
    base: str
    residue_classes: tuple[tuple[str, ...], ...]
    representatives: tuple[MonoidExpr, ...]
    window_check: WindowCheck | None = field(default=None)

    def to_dict(self) -> dict:
        out = {"d": self.d, "base": self.base,
               "residue_classes": [list(c) for c in self.residue_classes],
               "ideal_representatives": [str(r) for r in self.representatives]}
        if self.window_check is not None:
            out["window_check"] = self.window_check.to_dict()
        return out


def _live_trajectories(g: Graph, steps: int) -> dict[str, list[list[int]]]:
    out = {}
    for v in g.vertices:
        run = _Run(g, MonoidExpr.gen(v), 0)
        traj = [run.live]
        for _ in range(steps):
            run.step()
            traj.append(run.live)
        out[v] = traj
    return out


def _mask(vec: list[int]) -> int:
    m = 0
    for i, c in enumerate(vec):
        if c:
            m |= 1 << i
    return m


def window_ideal_check(g: Graph, base: str, d: int, lo: int, hi: int,
                       cap: int | None = None) -> WindowCheck:
    """For each generator ``w(j)`` with ``lo <= j <= hi``, find residues ``r`` with ``w(j)`` in ``[base(r)]``.

    Membership ``w(j) <= n * base(r)`` is certified exactly as the order test
    does: at some frontier the normal form of ``w(j)`` is supported inside
    that of ``base(r)`` (graphs here have no sinks, so only live counts).
    A generator certified for two residues is a violation.
    """
    n = len(g.vertices)
    if cap is None:
        cap = n * n + (hi - lo)
    top = max(hi, d - 1)
    steps = top - min(lo, 0) + cap + 1
    traj = _live_trajectories(g, steps)
    masks = {v: [_mask(vec) for vec in t] for v, t in traj.items()}
    base_masks = masks[base]
    violations = []
    covered = uncertified = checked = 0
    for w in g.vertices:
        for j in range(lo, hi + 1):
            hits = []
            for r in range(d):
                start = max(j, r)
                for L in range(start, start + cap + 1):
                    sw, sv = masks[w][L - j], base_masks[L - r]
                    if sw & ~sv == 0:
                        hits.append(r)
                        break
            checked += 1
            if len(hits) > 1:
                violations.append((w, j, tuple(hits)))
            elif hits:
                covered += 1
            else:
                uncertified += 1
    return WindowCheck((lo, hi), checked, tuple(violations), covered, uncertified)


def decompose(g: Graph, base: str | None = None, window: tuple[int, int] | None = None,
              cap: int | None = None, check: bool = True) -> Decomposition:
    _require_no_sources(g, "decompose")
    if not is_strongly_connected(g):
        raise HypothesisError("decompose needs a strongly connected graph")
    base = base if base is not None else g.vertices[0]
    if base not in g.index:
        raise KeyError(f"unknown vertex {base!r}")
    d = period_of_vertex(g, base)
    _, depth = _component_depths(g, base)
    classes = [[] for _ in range(d)]
    for v in g.vertices:
        classes[depth[v] % d].append(v)
    reps = tuple(MonoidExpr.gen(base, i) for i in range(d))
    wc = None
    if check:
        lo, hi = window if window is not None else (0, 2 * len(g.vertices))
        wc = window_ideal_check(g, base, d, lo, hi, cap)
    return Decomposition(d, base, tuple(tuple(c) for c in classes), reps, wc)


# -- full report --

@dataclass(frozen=True)
class ClassificationReport:
    strongly_connected: bool
    period: int
    condition_L: bool
    taxonomy: CycleTaxonomy
    colours: PrimaryColours
    pis: bool
    d: int | None
    evidence: dict | None = None

    def to_dict(self) -> dict:
        c = self.colours
        out = {
            "strongly_connected": self.strongly_connected,
            "period": self.period,
            "condition_L": self.condition_L,
            "taxonomy": [e.to_dict() for e in self.taxonomy.entries],
            "taxonomy_counts": self.taxonomy.counts(),
            "P_l": list(c.P_l), "P_c": list(c.P_c), "P_ec": list(c.P_ec),
            "colour_classes": {
                "gamma_l": [list(x) for x in c.gamma_l],
                "gamma_c": [list(x) for x in c.gamma_c],
                "gamma_ec": [list(x) for x in c.gamma_ec],
            },
            "pis": self.pis,
            "d": self.d,
        }
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out


def graph_period(g: Graph) -> int:
    """Period of the source-stripped graph when strongly connected; else gcd of component periods."""
    core = strongly_connected_component(g)
    if core.edges and is_strongly_connected(core):
        return period_of_graph(core)
    d = 0
    for e in classify_cycles(g).entries:
        d = gcd(d, e.period)
    return d


def monoid_evidence(g: Graph, cap: int | None = None) -> dict:
    """Monoid-side spot checks backing the graph-side verdicts."""
    tax = classify_cycles(g)
    out: dict = {"extreme_witnesses": [], "no_exit_periodicity": []}
    for e in tax.entries:
        x, k = e.witness
        gen = MonoidExpr.gen(x)
        if e.kind == EXTREME:
            r = lt_talented(g, gen.shift(k), gen, cap)
            out["extreme_witnesses"].append({"vertex": x, "shift": k, "lt": r.verdict.value})
        elif e.kind == NO_EXIT:
            out["no_exit_periodicity"].append(
                {"vertex": x, "shift": k, "eq": eq_talented(g, gen.shift(k), gen)})
    if g.vertices and not sources(g):
        out["group_check"] = group_check_graph_monoid(g).verdict.value
        if is_strongly_connected(g):
            out["decomposition"] = decompose(g).to_dict()
    return out


def classify(g: Graph, evidence: bool = True) -> ClassificationReport:
    pis = classify_pis(g)
    return ClassificationReport(
        strongly_connected=is_strongly_connected(g),
        period=graph_period(g),
        condition_L=condition_L(g),
        taxonomy=classify_cycles(g),
        colours=primary_colours(g),
        pis=pis.pis,
        d=pis.d,
        evidence=monoid_evidence(g) if evidence else None,
    )
