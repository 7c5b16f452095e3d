import json
import subprocess
import sys
from pathlib import Path

import pytest

from tyloc.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_constraints_then_encode_compose(tmp_path, capsys):
    code, ir_text, _ = run(capsys, "constraints", DATA / "worked.ml")
    assert code == 0 and ir_text.splitlines()[-1] == "2 'l3 = 'x1 -> 'l2"
    ir_file = tmp_path / "workeda.tir"
    ir_file.write_text(ir_text)
    code, smt, _ = run(capsys, "encode", ir_file, "--encoding", "deep")
    assert code == 0 and smt.startswith("(declare-datatype Type")
    assert "(assert-soft l0 :weight 5)" in smt


def test_localize(z3_available, capsys):
    code, out, _ = run(capsys, "localize", DATA / "worked.ml", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "error-source" and rep["total_weight"] == 1
    assert rep["removed"][0]["range"] in {"1;8-1;12", "1;16-1;19", "1;20-1;21"}
    assert list(rep) == ["program", "verdict", "removed", "total_weight", "objective",
                         "timings", "constraint_count", "encoding"]


def test_localize_ir_with_hard(z3_available, capsys):
    code, out, _ = run(capsys, "localize", "--ir", DATA / "worked.tir", "--hard", "1,2,3")
    assert code == 0
    assert "weight 3" in out and "location 4" in out


def test_localize_hard_conflict_exit_code(z3_available, capsys):
    code, out, _ = run(capsys, "localize", "--ir", DATA / "worked.tir", "--hard", "0,1,2,3,4")
    assert code == 4 and "hard-conflict" in out


def test_localize_timeout_exit_code(tmp_path, capsys):
    slow = tmp_path / "slow.py"
    slow.write_text("import time\ntime.sleep(5)\n")
    code, out, _ = run(capsys, "localize", DATA / "worked.ml",
                       "--solver", f"{sys.executable} {slow}", "--timeout", "0.05")
    assert code == 3 and "timeout" in out


def test_missing_solver_exit_code(capsys):
    code, _, err = run(capsys, "localize", DATA / "worked.ml", "--solver", "/no/such/solver")
    assert code == 6 and "SolverNotFound" in err


def test_syntax_error_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.ml"
    bad.write_text("let x =")
    code, _, err = run(capsys, "constraints", bad)
    assert code == 2 and err.startswith(f"{bad}:1;7: syntax error:")


def test_unbound_variable_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.ml"
    bad.write_text("nope 1")
    code, _, err = run(capsys, "constraints", bad)
    assert code == 2 and "1;0-1;4: unbound variable 'nope'" in err


def test_missing_file(capsys):
    code, _, _ = run(capsys, "constraints", "/no/such/file.ml")
    assert code == 2


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", DATA / "worked.ml", "--json")
    assert code == 0
    assert json.loads(out) == {"min_weight": 1, "sources": [[1], [3], [4]]}
    code, _, _ = run(capsys, "oracle", DATA / "worked.ml", "--limit", "3")
    assert code == 5


def test_eval(z3_available, capsys):
    code, out, _ = run(capsys, "eval", DATA / "eval" / "manifest.txt", "--jobs", "2")
    assert code == 0
    assert "tyloc" in out and "# of outcomes" in out
    code, out, _ = run(capsys, "eval", DATA / "eval" / "manifest.txt", "--json")
    records = [json.loads(l) for l in out.splitlines()]
    per_program = records[:-2]
    assert [Path(r["program"]).name for r in per_program] == [
        "string_not.ml", "branch.ml", "length.ml", "fine.ml"]
    assert per_program[3]["verdict"] == "well-typed"
    length = per_program[2]
    assert length["outcome"]["classical"] == "hit"
    # either co-minimal location may be reported
    picked = length["removed"][0]["range"]
    assert picked in {"1;0-1;6", "1;7-1;8"}
    assert length["outcome"]["tyloc"] == ("hit" if picked == "1;7-1;8" else "miss")
    table = records[-2]["table"]
    assert sum(r["count"] for r in table) == 3


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "tyloc.cli", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "localize" in out.stdout
