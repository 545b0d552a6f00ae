import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from branchtime.cli import InputError, main, parse_ic

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def spec(name):
    return str(SCENARIOS / f"{name}.json")


@pytest.fixture
def write_spec(tmp_path):
    def _write(doc):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- build -------------------------------------------------------------------------


def test_build_split(capsys):
    code, out, _ = run(capsys, "build", spec("split2"))
    assert code == 0
    assert "segments: 3" in out.splitlines()
    assert "valid: true" in out


def test_build_rejects_single_branch(capsys, write_spec):
    path = write_spec({"events": [{"kind": "division", "path": [], "t": 0, "branches": 1}]})
    code, _, err = run(capsys, "build", path)
    assert code == 1
    assert "events[0]" in err


def test_build_identification(capsys):
    code, out, _ = run(capsys, "build", spec("loop020"))
    assert code == 0
    assert "chronology-violating: true" in out and "identifications: 1" in out


def test_build_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "build", str(tmp_path / "nope.json"))
    assert code == 1 and err.startswith("error:")


def test_build_bad_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "build", str(path))
    assert code == 1 and "bad.json:1:2" in err


def test_horizon_override(capsys):
    code, out, _ = run(capsys, "graph", spec("split2"), "--horizon", "-1,1")
    assert code == 0 and '"[-1,0)"' in out


# --- solve ---------------------------------------------------------------------------


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_solve_writes_csv(capsys, tmp_path):
    out_path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "solve", spec("split2"), "--f", "x", "--ic", "[]@-1=1", "--out", str(out_path))
    assert code == 0
    rows = _rows(out_path.read_text(encoding="utf-8"))
    (row,) = [r for r in rows if r["branch_path"] == "[1]" and float(r["t"]) == 0.0]
    assert abs(float(row["x"]) - math.e) < 1e-6


def test_solve_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "solve", spec("line"), "--f", "0", "--ic", "[]@0=4")
    assert code == 0
    assert out.startswith("segment,branch_path,t,x\ns0,[],-10,4\n")


def test_solve_inconsistent(capsys):
    code, out, _ = run(capsys, "solve", spec("split2"), "--f", "x", "--ic", "[1]@0=1", "--ic", "[2]@0=2")
    assert code == 2
    assert out.splitlines()[0] == "status: InconsistentInitialConditions"


def test_solve_report_file(capsys, tmp_path):
    report = tmp_path / "report.txt"
    code, _, _ = run(
        capsys, "solve", spec("stick2"), "--f", "x", "--ic", "[1]@0=3", "--ic", "[2]@0=3.001",
        "--report", str(report),
    )
    assert code == 2
    assert report.read_text(encoding="utf-8").startswith("status: StickingMismatch\n")


def test_solve_loop(capsys):
    code, out, _ = run(capsys, "solve", spec("loop020"), "--f", "1", "--ic", "[]@-1=0")
    assert code == 2 and "status: LoopInconsistent" in out


def test_solve_blowup(capsys):
    code, out, _ = run(capsys, "solve", spec("line"), "--f", "x^2", "--ic", "[]@0=1", "--horizon", "-1,3")
    assert code == 3 and out.startswith("status: Blowup")


def test_solve_tolerance_flags(capsys):
    argv = ["solve", spec("split2"), "--f", "0", "--ic", "[1]@0=1", "--ic", "[2]@0=1.01"]
    assert run(capsys, *argv)[0] == 2
    assert run(capsys, *argv, "--tol-abs", "0.1")[0] == 0
    assert run(capsys, *argv, "--tol", "0.1")[0] == 0
    assert run(capsys, *argv, "--tol-rel", "0.1")[0] == 0


@pytest.mark.parametrize(
    "extra, needle",
    [
        (["--f", "x +", "--ic", "[]@0=1"], "--f"),
        (["--f", "x", "--ic", "nonsense"], "PATH@T=VALUE"),
        (["--f", "x", "--ic", "[3]@1=1"], "--ic"),
        (["--f", "x"], "at least one"),
        (["--f", "x", "--ic", "[1]@0=1", "--step", "-1"], "step"),
    ],
)
def test_solve_input_errors(capsys, extra, needle):
    code, _, err = run(capsys, "solve", spec("split2"), *extra)
    assert code == 1 and needle in err


def test_negative_values_are_not_options(capsys):
    code, out, _ = run(capsys, "solve", spec("line"), "--f", "-x", "--ic", "[]@0=1", "--horizon", "-1,1")
    assert code == 0
    assert out.splitlines()[1].startswith("s0,[],-1,2.718281")


def test_parse_ic():
    assert parse_ic("[1, 2]@0.5=-3") == ([1, 2], 0.5, -3.0)
    assert parse_ic("[]@-1=1e-3") == ([], -1.0, 1e-3)
    with pytest.raises(InputError):
        parse_ic("[x]@0=1")


# --- graph / check -----------------------------------------------------------------------


def test_graph_line(capsys):
    code, out, _ = run(capsys, "graph", spec("line"))
    assert code == 0 and out.count("->") == 1


def test_graph_tree_vertex_degree(capsys):
    _, out, _ = run(capsys, "graph", spec("tree3"))
    assert sum(line.startswith("  n0 ->") for line in out.splitlines()) == 3


def test_graph_identification(capsys, tmp_path):
    dot = tmp_path / "g.dot"
    assert run(capsys, "graph", spec("loop020"), "--dot", str(dot))[0] == 0
    text = dot.read_text(encoding="utf-8")
    assert 'style=dashed, label="period=6.2831853071795862"' in text


def test_check_line(capsys):
    _, out, _ = run(capsys, "check", spec("line"))
    assert "is_hausdorff: true" in out and "is_partial_order: true" in out


def test_check_split(capsys):
    _, out, _ = run(capsys, "check", spec("split2"))
    lines = out.splitlines()
    assert "is_hausdorff: false" in lines
    assert "witness_pair: s1@0 s2@0" in lines
    assert "mccabe_is_hausdorff: true" in lines


def test_check_mccabe(capsys):
    _, out, _ = run(capsys, "check", spec("split2"), "--mccabe")
    assert "is_hausdorff: true" in out.splitlines()


def test_check_loop(capsys):
    code, out, _ = run(capsys, "check", spec("loop020"))
    assert code == 0 and "is_preorder: false" in out and "mccabe_is_hausdorff: unsupported" in out
    assert run(capsys, "check", spec("loop020"), "--mccabe")[0] == 1


# --- determinism ---------------------------------------------------------------------------


def test_byte_identical_runs(tmp_path):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        subprocess.run(
            [sys.executable, "-m", "branchtime", "solve", spec("tree3"), "--f", "x*(1-x)",
             "--ic", "[]@-2=0.5", "--out", str(out)],
            check=True,
        )
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
