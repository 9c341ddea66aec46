import json
import subprocess
import sys

from tmw import parse_graph
from tmw.cli import main

from conftest import GRAPHS


def run(capsys, *argv):
    code = main(["--no-timing", *map(str, argv)])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_eq_fork_back(capsys):
    code, rep, _ = run(capsys, "eq", GRAPHS / "fork_back.txt", "u", "u(2)+u(2)")
    assert code == 0 and rep["result"]["verdict"] == "yes"
    assert rep["schema"] == 1 and rep["command"] == "eq"
    assert rep["input_digest"].startswith("sha256:")
    assert "timing" not in rep


def test_eq_fork_no(capsys):
    code, rep, _ = run(capsys, "eq", GRAPHS / "fork.txt", "u", "u(2)+u(2)")
    assert code == 1 and rep["result"]["certificate"]["reason"] == "deposits differ"


def test_classify_path3(capsys):
    code, rep, _ = run(capsys, "classify", GRAPHS / "path3.txt")
    res = rep["result"]
    assert code == 0 and res["period"] == 2 and res["pis"] and res["d"] == 2
    assert res["evidence"]["group_check"] == "yes"


def test_leq_single_vertex(tmp_path, capsys):
    g = tmp_path / "one.txt"
    g.write_text("vertex v\n")
    code, rep, _ = run(capsys, "leq", g, "v(1)", "v")
    assert code == 1 and rep["result"]["verdict"] == "no"


def test_leq_unknown_exit_code(capsys):
    # two growing loops feeding a closed cycle: undecided at cap 1
    code, rep, _ = run(capsys, "leq", GRAPHS / "rose2.txt", "v", "v(1)", "--cap", "1")
    assert code == 2 and rep["result"]["verdict"] == "unknown"


def test_graph_monoid_flag(capsys):
    code, rep, _ = run(capsys, "eq", GRAPHS / "merge.txt", "a", "b", "--monoid", "graph")
    assert code == 0
    code, rep, _ = run(capsys, "leq", GRAPHS / "cycle3.txt", "2*x", "y", "--monoid", "graph")
    assert code == 1


def test_nf(capsys):
    code, rep, _ = run(capsys, "nf", GRAPHS / "rose2.txt", "v", "--level", "2")
    assert code == 0 and rep["result"]["live"] == {"v": 4}
    code, rep, _ = run(capsys, "nf", GRAPHS / "fork.txt", "u", "--level", "1")
    assert rep["result"]["deposits"] == [["v", 1, 1], ["w", 1, 1]]
    code, rep, _ = run(capsys, "nf", GRAPHS / "rose2.txt", "v(1)", "--level", "3",
                       "--monoid", "graph")
    assert rep["result"]["normal_form"] == "4*v"


def test_input_errors_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("vertex a\nedge e a b\n")
    code, rep, err = run(capsys, "validate", bad)
    assert code == 3 and rep is None and "line 2" in err
    code, _, err = run(capsys, "eq", GRAPHS / "rose2.txt", "v", "q")
    assert code == 3 and "unknown vertex" in err
    code, _, err = run(capsys, "validate", tmp_path / "missing.txt")
    assert code == 3
    code, _, err = run(capsys, "nf", GRAPHS / "rose2.txt", "v(3)", "--level", "1")
    assert code == 3
    code, _, err = run(capsys, "decompose", GRAPHS / "mixed.txt")
    assert code == 3 and "strongly connected" in err


def test_move_and_verify(tmp_path, capsys):
    out = tmp_path / "split.txt"
    plan = GRAPHS / "rose2_split.json"
    code, rep, _ = run(capsys, "move", GRAPHS / "rose2.txt", "--move", "O", "--plan", plan,
                       "--output", out)
    assert code == 0 and rep["result"]["vertices"] == 2
    assert len(parse_graph(out.read_text()).edges) == 4
    code, rep, _ = run(capsys, "verify-move", GRAPHS / "rose2.txt", out, plan, "--move", "O")
    assert code == 0 and rep["result"]["inverse_ok"]["verdict"] == "yes"


def test_verify_merge_counterexample(tmp_path, capsys):
    plan = GRAPHS / "merge_split.json"
    code, rep, _ = run(capsys, "move", GRAPHS / "merge.txt", plan, "--move", "I")
    split = tmp_path / "f.json"
    split.write_text(json.dumps(rep["result"]["graph"]))
    code, rep, _ = run(capsys, "verify-move", GRAPHS / "merge.txt", split, "--move", "I",
                          "--plan", plan)
    assert code == 1
    assert ["a", "b"] in rep["result"]["graph_monoid_disagreements"]


def test_source_removal_cli(tmp_path, capsys):
    src = tmp_path / "g.txt"
    src.write_text("vertex s\nvertex v\nedge a s v\nedge l v v\nedge m v v\n")
    code, rep, _ = run(capsys, "move", src, "--move", "S", "--vertex", "s")
    assert code == 0 and rep["result"]["graph"]["vertices"] == ["v"]
    code, _, err = run(capsys, "move", src, "--move", "S", "--vertex", "v")
    assert code == 3
    code, _, err = run(capsys, "move", src, "--move", "I")
    assert code == 3 and "plan" in err


def test_paradox(capsys):
    code, rep, _ = run(capsys, "paradox", GRAPHS / "two_loops.txt")
    assert code == 0 and rep["result"]["witness"] == {"parts": ["b", "a"], "shifts": [1, 0]}
    code, rep, _ = run(capsys, "paradox", GRAPHS / "cycle3.txt")
    assert code == 1 and rep["result"]["paradoxical"] is False
    code, rep, _ = run(capsys, "paradox", GRAPHS / "cycle3.txt", GRAPHS / "cycle3_witness.json")
    assert code == 1 and rep["result"]["verification"]["verdict"] == "no"


def test_decompose(capsys):
    code, rep, _ = run(capsys, "decompose", GRAPHS / "path3.txt", "--base", "u2")
    assert code == 0 and rep["result"]["d"] == 2
    assert rep["result"]["residue_classes"] == [["u2"], ["u1", "u3"]]


def test_sweep(capsys):
    code, rep, _ = run(capsys, "sweep", "decompose", "--count", "10", "--seed", "3")
    assert code == 0 and rep["result"]["count"] == 10 and not rep["result"]["failures"]


def test_reports_are_deterministic(capsys):
    first = run(capsys, "classify", GRAPHS / "mixed.txt")
    second = run(capsys, "classify", GRAPHS / "mixed.txt")
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tmw", "validate", str(GRAPHS / "cycle3.txt")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    rep = json.loads(proc.stdout)
    assert rep["result"]["edges"] == 3 and "timing" in rep
