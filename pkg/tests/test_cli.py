import json
import subprocess
import sys

import pytest

from starproc import fixtures, proofs
from starproc.bisim import exprs_bisimilar
from starproc.cli import INTERNAL, NEGATIVE, OK, USAGE, run
from starproc.expr import parse


def fx(name):
    return str(fixtures.fixture_path(name))


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bisim_verdicts(capsys):
    code, out, _ = call(capsys, "bisim", "a*", "(1+a)*")
    assert code == OK and out.strip() == "bisimilar"
    code, out, _ = call(capsys, "--json", "bisim", "a·(b+c)", "a·b+a·c")
    assert code == NEGATIVE and json.loads(out) == {"bisimilar": False}


def test_flags_after_the_subcommand(capsys):
    code, out, _ = call(capsys, "bisim", "a", "b", "--json")
    assert code == NEGATIVE and json.loads(out)["bisimilar"] is False


def test_expressible_g1(capsys):
    code, out, _ = call(capsys, "expressible", fx("g1"), "--json")
    doc = json.loads(out)
    assert code == NEGATIVE
    assert doc["verdict"] == "NOT_EXPRESSIBLE_1FREE"
    assert doc["diagnostic"] == "collapsed chart fails LEE"


def test_extract_from_g2a_witness(capsys, tmp_path):
    collapsed = tmp_path / "c.json"
    witness = tmp_path / "w.json"
    assert call(capsys, "collapse", fx("g2a"), "--out", str(collapsed))[0] == OK
    assert call(capsys, "lee", str(collapsed), "--witness-out", str(witness))[0] == OK
    code, out, _ = call(capsys, "--json", "extract", "--witness", str(witness))
    assert code == OK
    assert exprs_bisimilar(parse(json.loads(out)["principal"]), parse("a*"))


def test_verify_solution(capsys, tmp_path):
    sol = tmp_path / "s.json"
    sol.write_text(json.dumps({"values": {"Y1": "a*", "Y2": "a*"}}))
    code, out, _ = call(capsys, "verify-solution", fx("g2a"), str(sol), "--complete")
    assert code == OK and "complete" in out
    sol.write_text(json.dumps({"values": {"Y1": "0", "Y2": "0"}}))
    code, _, _ = call(capsys, "verify-solution", fx("g2a"), str(sol))
    assert code == NEGATIVE


def test_lee_and_witness_validate(capsys):
    code, out, _ = call(capsys, "--json", "lee", fx("fig1"))
    assert code == OK and json.loads(out)["llee"]
    assert call(capsys, "lee", fx("g1"))[0] == NEGATIVE
    code, out, _ = call(capsys, "--json", "lee", fx("g2"))
    assert code == NEGATIVE
    assert sorted(map(tuple, json.loads(out)["unbreakable_cycle"])) == [("Y1", "a", "Y2"), ("Y2", "b", "Y1")]
    code, out, _ = call(capsys, "witness-validate", fx("fig4_witness"))
    assert code == OK and out.startswith("valid")


def test_fixture_analyses(capsys):
    assert call(capsys, "near-collapsed", fx("fig5"))[0] == OK
    assert call(capsys, "twin-crystal", fx("fig5_witness"))[0] == OK
    code, out, _ = call(capsys, "--json", "elevate", fx("fig5"), "--map", "abcd1:abcd2,abcd2:abcd1")
    doc = json.loads(out)
    assert code == OK and len(doc["chart"]["vertices"]) == 16
    code, out, _ = call(capsys, "--json", "connect-through", fx("fig4"), "abcd1", "abcd2")
    doc = json.loads(out)
    assert code == OK and doc["one_collapsed"] and not doc["llee"]


def test_crystallize_outputs(capsys, tmp_path):
    chart = tmp_path / "g.json"
    code, out, _ = call(capsys, "--seed", "4", "gen", "--kind", "chart")
    assert code == OK
    chart.write_text(out)
    out_chart, out_w, trace, dot = (tmp_path / n for n in ("o.json", "ow.json", "t.jsonl", "o.dot"))
    code, _, err = call(capsys, "crystallize", str(chart), "--input-witness", str(chart), "--out", str(out_chart),
                        "--witness", str(out_w), "--trace", str(trace), "--dot", str(dot))
    assert code == OK, err
    assert json.loads(out_chart.read_text())["vertices"]
    assert "marking" in json.loads(out_w.read_text())
    for line in trace.read_text().splitlines():
        assert "op" in json.loads(line)
    assert dot.read_text().startswith("digraph")


def test_check_proof(capsys):
    path = str(proofs.proof_path("loop_with_exit"))
    code, out, _ = call(capsys, "check-proof", path)
    assert code == OK and out.strip() == "a* = a*·1"
    assert call(capsys, "check-proof", path, "--system", "MilMinus")[0] == NEGATIVE
    assert call(capsys, "check-proof", str(proofs.proof_path("guard_violation")))[0] == NEGATIVE
    assert call(capsys, "check-proof", str(proofs.proof_path("bad_transitivity")))[0] == NEGATIVE


def test_gen_emits_json(capsys):
    code, out, _ = call(capsys, "gen", "--kind", "expr", "--seed", "3")
    assert code == OK and "expr" in json.loads(out)


def test_usage_errors(capsys):
    assert call(capsys, "parse", "a+(b")[0] == USAGE
    assert call(capsys, "lee", "/no/such/file.json")[0] == USAGE
    assert call(capsys, "bogus")[0] == USAGE
    assert call(capsys, "chart", "a*·b", "--max-vertices", "1")[0] == USAGE
    assert call(capsys, "extract")[0] == USAGE


def test_bad_json_is_a_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert call(capsys, "lee", str(bad))[0] == USAGE


def test_internal_failures_map_to_exit_3(capsys, monkeypatch):
    from starproc import transform
    from starproc.errors import CrystallizationFailed

    def boom(*args, **kwargs):
        raise CrystallizationFailed("forced")

    monkeypatch.setattr(transform, "crystallize", boom)
    assert call(capsys, "crystallize", fx("fig5"))[0] == INTERNAL


def test_suite_report(capsys, tmp_path):
    code, out, _ = call(capsys, "suite", "--only", "2,4", "--report-dir", str(tmp_path))
    assert code == OK
    rows = out.strip().splitlines()
    assert rows[0].split("\t")[0] == "check" and len(rows) == 3
    assert (tmp_path / "results.tsv").exists()
    assert (tmp_path / "timings.png").stat().st_size > 0
    assert (tmp_path / "fig5_witness.png").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "starproc", "bisim", "a*", "(1+a)*"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "bisimilar"
