import io
import subprocess
import sys

import pytest

from dagquery import cli, library
from dagquery import topology as topo


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def test_clauses_counts():
    code, text = run("clauses", "--topology", "builtin:3e12")
    assert code == 0
    assert "14 clauses before fixing" in text and "10 after" in text
    assert "(mirror c" in text
    code, text = run("clauses", "--topology", "builtin:bubble")
    assert "2 clauses before fixing" in text


@pytest.mark.parametrize("name", ["3e12", "4e16", "4u18", "5e20"])
def test_check_fixture_passes(name):
    code, text = run("clauses", "--topology", f"builtin:{name}", "--check-fixture")
    assert code == 0 and "fixture: match" in text


def test_check_fixture_reports_unmatched_clauses():
    code, text = run("clauses", "--topology", "builtin:4t18", "--check-fixture")
    assert code == 1
    assert "unexpected c13: +s1 +s3 +s4 -s5 +s6 -s7" in text


def test_synth_row_and_records():
    code, text = run("synth", "--topology", "builtin:4e16", "--format", "records")
    assert code == 0
    row = dict(kv.split("=") for kv in text.splitlines()[-1].split())
    assert row["ancillas"] == "6" and row["total_qubits"] == "24"
    code, text = run("synth", "--topology", "builtin:bubble", "--format", "records")
    assert "ancillas=1 " in text


def test_synth_baseline_gain():
    code, text = run("synth", "--topology", "builtin:5e20", "--baseline", "--format", "records")
    row = dict(kv.split("=") for kv in text.splitlines()[-1].split())
    assert row["baseline_ancillas"] == "21" and row["ancilla_gain"] == "57.1%"


def test_verify_small_and_over_budget():
    code, text = run("verify", "--topology", "builtin:3e9")
    assert code == 0 and "classical oracles agree" in text and "verdict ok" in text
    code, text = run("verify", "--topology", "builtin:5e20")
    assert code == 0 and "31 qubits exceeds the budget of 24" in text


def test_report_table_and_determinism():
    args = ["report", "--topology", "builtin:3e12", "--topology", "builtin:5e20", "--baseline"]
    code, a = run(*args, "--format", "records")
    _, b = run(*args, "--format", "records")
    assert code == 0 and a == b
    code, table = run(*args)
    assert "MCX-style baseline" in table and "57.1%" in table


def test_report_empty_and_row_errors(tmp_path):
    code, text = run("report")
    assert code == 0 and text.splitlines()[0].split()[0] == "name"
    bad = tmp_path / "bad.top"
    bad.write_text("topology bad\nvertices 2\nset 0 0 1 1\n")
    code, text = run("report", "--topology", "builtin:bubble", "--topology", str(bad))
    assert code == 2
    assert "bubble" in text and "! " in text and "bad.top" in text


def test_input_errors(tmp_path, capsys):
    assert run("synth", "--topology", "builtin:nope")[0] == 2
    bad = tmp_path / "x.top"
    bad.write_text("topology x\nvertices 2\nset 0 0 1 q\n")
    assert run("clauses", "--topology", str(bad))[0] == 2
    assert "x.top:3" in capsys.readouterr().err
    assert run("synth")[0] == 2
    assert run("synth", "--topology", "builtin:bubble", "--opt-budget", "0")[0] == 2


def test_file_topology(tmp_path):
    src = tmp_path / "k4.top"
    src.write_text(topo.format_topology(library.builtin("3e12")))
    code, text = run("clauses", "--topology", str(src))
    assert code == 0 and "10 after" in text


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "dagquery", "clauses", "--topology", "builtin:bubble"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and "c0:" in res.stdout
