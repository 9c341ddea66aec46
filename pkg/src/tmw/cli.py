"""``tmw``: command-line access to the monoid calculus and graph invariants.

Every command prints one JSON report on stdout.  Exit codes: 0 definitive
yes or success, 1 definitive no or failed verification, 2 undecided within
the cap, 3 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from .expr import MonoidExpr, Tri, parse_expr
from .flow import decide_eq, leq_talented, normal_form
from .graph import (Graph, GraphFormatError, HypothesisError, format_graph, graph_to_dict,
                    parse_graph, scc, sinks, sources)
from .graph_monoid import DEFAULT_EQ_CAP, DEFAULT_LEQ_CAP, eq_graph_monoid, leq_graph_monoid
from .moves import (PlanError, induced_map_in_split, induced_map_out_split,
                    induced_map_source_removal, move_in_split, move_out_split,
                    move_source_removal, parse_plan, verify_map)
from .paradox import build_witness, is_paradoxical, parse_witness, verify_witness
from .structure import classify, decompose
from .sweeps import SWEEPS, run_sweep

EXIT = {"yes": 0, "no": 1, "unknown": 2}


class InputError(Exception):
    pass


class _Inputs:
    """Reads input files once and keeps a digest of everything read."""

    def __init__(self):
        self.hash = hashlib.sha256()

    def read(self, path: str) -> str:
        try:
            data = Path(path).read_bytes() if path != "-" else sys.stdin.buffer.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.hash.update(data)
        return data.decode("utf-8")

    def graph(self, path: str) -> Graph:
        try:
            return parse_graph(self.read(path))
        except GraphFormatError as exc:
            raise InputError(f"{path}: {exc}") from None

    def text(self, s: str) -> str:
        self.hash.update(s.encode())
        return s

    @property
    def digest(self) -> str:
        return "sha256:" + self.hash.hexdigest()


def _expr(inp: _Inputs, g: Graph, text: str) -> MonoidExpr:
    try:
        return parse_expr(inp.text(text), g.vertices)
    except ValueError as exc:
        raise InputError(f"bad expression {text!r}: {exc}") from None


def _tri(t: Tri) -> dict:
    return {"verdict": t.verdict.value, "certificate": t.certificate}


# -- commands: each returns (result payload, exit code) --

def cmd_validate(args, inp):
    g = inp.graph(args.graph)
    cond = scc(g)
    return {"vertices": len(g.vertices), "edges": len(g.edges),
            "sinks": sorted(sinks(g)), "sources": sorted(sources(g)),
            "components": len(cond.components), "graph": graph_to_dict(g)}, 0


def cmd_classify(args, inp):
    g = inp.graph(args.graph)
    return classify(g, evidence=not args.no_evidence).to_dict(), 0


def cmd_eq(args, inp):
    g = inp.graph(args.graph)
    x, y = _expr(inp, g, args.x), _expr(inp, g, args.y)
    if args.monoid == "graph":
        t = eq_graph_monoid(g, x, y, args.cap or DEFAULT_EQ_CAP)
    else:
        t = decide_eq(g, x, y)
    return {"x": str(x), "y": str(y), "monoid": args.monoid, **_tri(t)}, EXIT[t.verdict.value]


def cmd_leq(args, inp):
    g = inp.graph(args.graph)
    x, y = _expr(inp, g, args.x), _expr(inp, g, args.y)
    if args.monoid == "graph":
        t = leq_graph_monoid(g, x, y, args.cap or DEFAULT_LEQ_CAP)
    else:
        t = leq_talented(g, x, y, args.cap)
    return {"x": str(x), "y": str(y), "monoid": args.monoid, **_tri(t)}, EXIT[t.verdict.value]


def cmd_nf(args, inp):
    g = inp.graph(args.graph)
    x = _expr(inp, g, args.x)
    levels = x.levels()
    level = args.level if args.level is not None else (levels[-1] if levels else 0)
    try:
        st = normal_form(g, x, level)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    nf = st.to_expr()
    out = {"x": str(x), "monoid": args.monoid, "level": st.level,
           "live": {v: st.live[v] for v in g.vertices if v in st.live},
           "deposits": [[v, lvl, k] for (v, lvl), k in sorted(st.deposits.items())],
           "normal_form": str(nf)}
    if args.monoid == "graph":
        out["normal_form"] = str(MonoidExpr({(v, 0): k for v, k in nf.forget().items()}))
    return out, 0


def _plan(inp, args, kind):
    args.plan = args.plan or args.plan_opt
    if not args.plan:
        raise InputError(f"--move {args.move} needs a plan file")
    try:
        return parse_plan(inp.read(args.plan), kind)
    except PlanError as exc:
        raise InputError(f"{args.plan}: {exc}") from None


def _apply_move(args, inp, g):
    if args.move == "S":
        if not args.vertex:
            raise InputError("--move S needs --vertex")
        return move_source_removal(g, args.vertex), None
    plan = _plan(inp, args, "in" if args.move == "I" else "out")
    return (move_in_split if args.move == "I" else move_out_split)(g, plan), plan


def cmd_move(args, inp):
    g = inp.graph(args.graph)
    f, _ = _apply_move(args, inp, g)
    out = {"move": args.move, "vertices": len(f.vertices), "edges": len(f.edges)}
    if args.output:
        Path(args.output).write_text(format_graph(f))
        out["output"] = args.output
    else:
        out["graph"] = graph_to_dict(f)
    return out, 0


def cmd_verify_move(args, inp):
    g, f = inp.graph(args.src), inp.graph(args.dst)
    if args.move == "S":
        if not args.vertex:
            raise InputError("--move S needs --vertex")
        mp = induced_map_source_removal(g, f, args.vertex)
    else:
        plan = _plan(inp, args, "in" if args.move == "I" else "out")
        build = induced_map_in_split if args.move == "I" else induced_map_out_split
        mp = build(g, f, plan)
    res = verify_map(mp, tuple(args.window) if args.window else None)
    verdicts = {res.well_defined.verdict.value, res.inverse_ok.verdict.value}
    code = 1 if "no" in verdicts else 2 if "unknown" in verdicts else 0
    return {"move": args.move, "map": mp.to_dict(), **res.to_dict()}, code


def cmd_paradox(args, inp):
    g = inp.graph(args.graph)
    para = is_paradoxical(g)
    out = {"paradoxical": para}
    if args.witness:
        try:
            w = parse_witness(inp.read(args.witness), g.vertices)
        except (ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"{args.witness}: {exc}") from None
    elif para:
        w = build_witness(g)
    else:
        return out, 1
    t = verify_witness(g, w, args.cap)
    out.update(witness=w.to_dict(), verification=_tri(t))
    return out, EXIT[t.verdict.value]


def cmd_decompose(args, inp):
    g = inp.graph(args.graph)
    dec = decompose(g, args.base, tuple(args.window) if args.window else None, args.cap)
    return dec.to_dict(), 1 if dec.window_check.violations else 0


def cmd_sweep(args, inp):
    inp.text(f"{args.name}:{args.seed}:{args.count}")
    res = run_sweep(args.name, seed=args.seed, jobs=args.jobs, count=args.count)
    failed = res.get("failures") or res.get("mismatches") or res.get("mismatches_small")
    return res, 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tmw", description=__doc__.splitlines()[0])
    p.add_argument("--no-timing", action="store_true",
                   help="omit the timing field so reports are byte-identical across runs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="parse a graph and summarise it")
    s.add_argument("graph")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("classify", help="period, cycle taxonomy, colours, PIS verdict")
    s.add_argument("graph")
    s.add_argument("--no-evidence", action="store_true", help="skip monoid-side spot checks")
    s.set_defaults(func=cmd_classify)

    for name, func, helptext in (("eq", cmd_eq, "is x = y"), ("leq", cmd_leq, "is x <= y")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("graph")
        s.add_argument("x")
        s.add_argument("y")
        s.add_argument("--monoid", choices=("talented", "graph"), default="talented")
        s.add_argument("--cap", type=int)
        s.set_defaults(func=func)

    s = sub.add_parser("nf", help="normal form of an expression at a frontier level")
    s.add_argument("graph")
    s.add_argument("x")
    s.add_argument("--level", type=int)
    s.add_argument("--monoid", choices=("talented", "graph"), default="talented")
    s.add_argument("--cap", type=int, help="accepted for symmetry; normal forms are uncapped")
    s.set_defaults(func=cmd_nf)

    for name, func in (("move", cmd_move), ("verify-move", cmd_verify_move)):
        s = sub.add_parser(name)
        if name == "move":
            s.add_argument("graph")
            s.add_argument("--output", help="write the new graph here instead of into the report")
        else:
            s.add_argument("src")
            s.add_argument("dst")
            s.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
        s.add_argument("--move", choices=("S", "I", "O"), required=True)
        s.add_argument("plan", nargs="?", help="split plan JSON for moves I and O")
        s.add_argument("--plan", dest="plan_opt", metavar="PLAN", help="same as the positional plan")
        s.add_argument("--vertex", help="source to remove for move S")
        s.set_defaults(func=func)

    s = sub.add_parser("paradox", help="paradoxicality with a built or supplied witness")
    s.add_argument("graph")
    s.add_argument("witness", nargs="?")
    s.add_argument("--cap", type=int)
    s.set_defaults(func=cmd_paradox)

    s = sub.add_parser("decompose", help="residue classes and windowed ideal check")
    s.add_argument("graph")
    s.add_argument("--base")
    s.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    s.add_argument("--cap", type=int)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("sweep", help="randomised or exhaustive batch check")
    s.add_argument("name", choices=SWEEPS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    inp = _Inputs()
    start = time.perf_counter()
    try:
        result, code = args.func(args, inp)
    except (InputError, HypothesisError, PlanError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"tmw: error: {msg}", file=sys.stderr)
        return 3
    report = {"schema": 1, "command": args.command, "argv": argv,
              "input_digest": inp.digest, "result": result}
    if not args.no_timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
