"""Batch checks over graph families, each returning a JSON-ready summary.

Every sweep is reproducible from its seed; ``jobs > 1`` splits the work over
processes by graph.
"""

from __future__ import annotations

import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

from .expr import MonoidExpr
from .generators import (canonical_codes, decode_all, random_periodic, random_plan,
                         random_sink_free, random_strongly_connected, with_regular_source,
                         random_graph)
from .graph import Graph, is_strongly_connected
from .moves import (induced_map_in_split, induced_map_out_split, induced_map_source_removal,
                    move_in_split, move_out_split, move_source_removal, verify_map)
from .paradox import ParadoxWitness, build_witness, is_paradoxical, verify_witness
from .structure import condition_L, decompose, group_check_matrix, period_of_graph


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- decomposition --

def random_decomposable(rng: random.Random, max_n: int = 8) -> Graph:
    """Alternate plain random strongly connected graphs with layered ones of forced period."""
    n = rng.randint(1, max_n)
    if rng.random() < 0.5:
        return random_strongly_connected(rng, n)
    return random_periodic(rng, n, rng.randint(1, n))


def check_decomposition(g: Graph) -> dict:
    dec = decompose(g)
    classes = [set(c) for c in dec.residue_classes]
    covered = set().union(*classes)
    partition = (covered == set(g.vertices) and all(classes)
                 and sum(map(len, classes)) == len(g.vertices))
    wc = dec.window_check
    return {"n": len(g.vertices), "d": dec.d, "period": period_of_graph(g),
            "partition": partition, "violations": len(wc.violations),
            "uncertified": wc.uncertified}


def decomposition_sweep(count: int = 200, seed: int = 0, max_n: int = 8, jobs: int = 1) -> dict:
    rng = random.Random(seed)
    graphs = [random_decomposable(rng, max_n) for _ in range(count)]
    rows = _map(check_decomposition, graphs, jobs)
    bad = [i for i, r in enumerate(rows)
           if r["d"] != r["period"] or not r["partition"] or r["violations"]]
    return {"count": count, "failures": bad,
            "periods": dict(sorted(Counter(r["d"] for r in rows).items())),
            "uncertified_generators": sum(r["uncertified"] for r in rows)}


# -- group criterion --

def _group_row(counts) -> tuple[str, bool]:
    g = Graph.from_matrix(counts)
    return group_check_matrix(counts).verdict.value, is_strongly_connected(g) and condition_L(g)


def group_sweep(max_n: int = 4, max_mult: int = 2, jobs: int = 1) -> dict:
    """Group check on every no-source multigraph up to isomorphism."""
    verdicts: Counter = Counter()
    mismatches = []
    for n in range(1, max_n + 1):
        mats = decode_all(canonical_codes(n, max_mult), n, max_mult)
        mats = mats[(mats.sum(axis=1) > 0).all(axis=1)].tolist()
        for counts in mats:
            verdicts[group_check_matrix(counts).verdict.value] += 1
        if n <= 3:
            rows = _map(_group_row, mats, jobs)
            mismatches += [m for m, (v, want) in zip(mats, rows)
                           if v != "unknown" and (v == "yes") != want]
    total = sum(verdicts.values())
    return {"graphs": total, "verdicts": dict(verdicts),
            "unknown_rate": verdicts["unknown"] / total if total else 0.0,
            "mismatches_small": mismatches}


# -- moves --

def _move_instance(kind: str, rng: random.Random):
    if kind == "source-removal":
        g = with_regular_source(rng, random_graph(rng, rng.randint(1, 4)))
        f = move_source_removal(g, "src")
        return g, induced_map_source_removal(g, f, "src")
    g = random_sink_free(rng, rng.randint(1, 5))
    plan = random_plan(rng, g, kind)
    if kind == "in":
        return g, induced_map_in_split(g, move_in_split(g, plan), plan)
    return g, induced_map_out_split(g, move_out_split(g, plan), plan)


def moves_sweep(kind: str, count: int = 100, seed: int = 0) -> dict:
    rng = random.Random(seed)
    verdicts: Counter = Counter()
    failures = []
    for i in range(count):
        _, mp = _move_instance(kind, rng)
        res = verify_map(mp)
        key = (res.well_defined.verdict.value, res.inverse_ok.verdict.value)
        verdicts["/".join(key)] += 1
        if key != ("yes", "yes"):
            failures.append(i)
    return {"kind": kind, "count": count, "verdicts": dict(verdicts), "failures": failures}


# -- paradox --

def fabricated_witnesses(g: Graph, radius: int = 2):
    """Each vertex as its own part, every shift pattern in ``[-radius, radius]``."""
    from itertools import product
    parts = tuple(MonoidExpr.gen(v) for v in g.vertices)
    for shifts in product(range(-radius, radius + 1), repeat=len(parts)):
        yield ParadoxWitness(parts, shifts)


def paradox_row(g: Graph) -> dict:
    para = is_paradoxical(g)
    if para:
        ok = verify_witness(g, build_witness(g)).yes
    else:
        ok = any(verify_witness(g, w).yes for w in fabricated_witnesses(g))
    return {"paradoxical": para, "witness_verified": ok}


def paradox_sweep(max_n: int = 3, max_mult: int = 2, jobs: int = 1) -> dict:
    graphs = [Graph.from_matrix(m) for n in range(1, max_n + 1)
              for m in decode_all(canonical_codes(n, max_mult), n, max_mult).tolist()]
    rows = _map(paradox_row, graphs, jobs)
    bad = [i for i, r in enumerate(rows) if r["paradoxical"] != r["witness_verified"]]
    return {"graphs": len(graphs),
            "paradoxical": sum(r["paradoxical"] for r in rows),
            "mismatches": bad}


SWEEPS = ("decompose", "group", "out-split", "in-split", "source-removal", "paradox")


def run_sweep(name: str, seed: int = 0, jobs: int = 1, count: int | None = None) -> dict:
    if name == "decompose":
        return decomposition_sweep(count or 200, seed, jobs=jobs)
    if name == "group":
        return group_sweep(jobs=jobs)
    if name in ("out-split", "in-split"):
        return moves_sweep(name.split("-")[0], count or 100, seed)
    if name == "source-removal":
        return moves_sweep("source-removal", count or 100, seed)
    if name == "paradox":
        return paradox_sweep(jobs=jobs)
    raise ValueError(f"unknown sweep {name!r}; choose from {', '.join(SWEEPS)}")
