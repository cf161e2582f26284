import subprocess
import sys
from pathlib import Path

import pytest

from relhyp.cli import main, run
from relhyp.report import Report, parse_report

SPECS = Path(__file__).resolve().parent.parent / "demos" / "specs"


def s(name):
    return str(SPECS / name)


INVOCATIONS = [
    ["info", s("z2z3.json")],
    ["reduce", s("z2z3.json"), "a.a.b.b.b.b"],
    ["dist", s("z2z3.json"), "1", "a.b.a.b"],
    ["geo", s("z2.json"), "1", "x.x.t", "--graph", "plain"],
    ["path", "classify", s("z2z3.json"), "a.b.a.b"],
    ["path", "decompose", s("z2z3.json"), "b.a.a.b"],
    ["path", "pi", s("z2z3.json"), "a.b"],
    ["path", "lift", s("z2z3.json"), "~A:1.~B:1", "--graph", "coned"],
    ["subgroup", "fold", s("z2z3.json"), s("dihedral.json")],
    ["subgroup", "contains", s("z2z3.json"), s("ab.json"), "--element", "a.b.a.b"],
    ["subgroup", "intersect", s("z2z3.json"), s("ab.json"), "--other", s("dihedral.json")],
    ["subgroup", "peripherals", s("z2z3.json"), s("dihedral.json"), "--reduced"],
    ["subgroup", "reduce-y", s("z2z3.json"), s("dihedral.json")],
    ["cond", "b", s("z2z3.json"), s("ab.json"), "1", "a"],
    ["cond", "decompose", s("z2z3.json")],
    ["cond", "fineness", s("z2_rel_x.json"), "--edge", "1~H", "-n", "6", "-R", "8"],
    ["cond", "embedded", s("z2_rel_x.json"), "--factor", "H", "--truncations", "2,4,6"],
    ["cond", "bcp", s("z2_rel_x.json"), "--pair", "H:2.t", "t.H:2", "--mu", "2", "--C", "2", "--bound", "1"],
    ["cond", "delta", s("z2.json"), "--radius", "4", "--seed", "7"],
    ["cond", "area", s("z2.json"), "x.x.t.X.X.T"],
    ["cond", "dehn", s("z2.json"), "-n", "4"],
    ["qc", "check", s("free_rel_a.json"), s("ab.json"), "--radius", "5"],
    ["qc", "strong", s("z2z3.json"), s("dihedral.json"), "--seed", "3"],
    ["qc", "distortion", s("z2z3.json"), s("ab.json"), "--radius", "6"],
    ["qc", "induce", s("z2z3.json"), s("dihedral.json")],
    ["qc", "iota", s("z2z3.json"), s("dihedral.json"), "--radius", "4"],
    ["qc", "tree-certify", s("z2z3.json"), s("ab.json"), "--radius", "6"],
]

BUDGETED = {"dist", "geo", "cond", "qc"}


def _id(argv):
    return " ".join(a for a in argv[:2] if not a.startswith("/"))


@pytest.mark.parametrize("argv", INVOCATIONS, ids=_id)
def test_report_shape_and_determinism(argv):
    code, text = run(argv)
    assert code in (0, 2, 3)
    assert text.endswith("\n") and "\r" not in text
    lines = text.rstrip("\n").split("\n")
    assert lines[0].startswith("OP\t") and lines[-1].startswith("VERDICT ")
    assert all("\t" in line for line in lines[:-1])
    assert run(argv) == (code, text)
    rep = parse_report(text)
    assert rep.render() == text
    assert parse_report(rep.explain()).render() == text
    if argv[0] in BUDGETED and argv[1] not in ("b", "area"):
        assert any(k.startswith("budget.") for k, _ in rep.rows)


def test_exit_codes():
    assert run(["qc", "check", s("free_rel_a.json"), s("ab.json"), "--radius", "6"])[0] == 0
    assert run(["cond", "fineness", s("z2_rel_x.json"), "--edge", "1~H", "-n", "6", "-R", "8"])[0] == 2
    assert run(["info", s("missing.json")])[0] == 1
    code, text = run(["cond", "area", s("z2.json"), "x.x.t.X.X.T", "--area-cap", "1"])
    assert code == 3 and "budget.area_cap\t1" in text


def test_fineness_report_has_growth_table():
    _, text = run(["cond", "fineness", s("z2_rel_x.json"), "--edge", "1~H", "-n", "6", "-R", "8"])
    rep = parse_report(text)
    counts = [int(v) for k, v in rep.rows if k.startswith("count.R")]
    assert counts == sorted(counts) and counts[-1] > counts[-2]


def test_failing_check_carries_witness():
    code, text = run(["qc", "check", s("free_rel_a.json"), s("b.json"), "--radius", "3"])
    rep = parse_report(text)
    assert code == rep.exit_code
    if rep.verdict == "Fail":
        assert "witness" in rep.stamp


def test_samplers_require_a_seed(capsys):
    with pytest.raises(SystemExit):
        run(["cond", "delta", s("z2.json")])
    with pytest.raises(SystemExit):
        run(["qc", "strong", s("z2z3.json"), s("dihedral.json")])


def test_negative_budget_rejected():
    with pytest.raises(SystemExit):
        run(["cond", "dehn", s("z2.json"), "-n", "-1"])


def test_explain_mentions_partition():
    _, text = run(["--explain", "cond", "decompose", s("z2z3.json")])
    assert text.startswith("== cond.decompose: Computed ==")
    assert "excluded" in text and "undetermined" in text


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.txt"
    code = main(["--out", str(out), "reduce", s("z2z3.json"), "a.a.b"])
    assert code == 0
    assert out.read_text(encoding="utf-8") == capsys.readouterr().out


def test_report_keys_are_validated():
    with pytest.raises(ValueError):
        Report("x").add("bad\tkey", 1)
    with pytest.raises(ValueError):
        Report("x").add("k", "two\nlines")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "relhyp.cli", "reduce", s("z2z3.json"), "a.a.b"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("OP\treduce\n")
