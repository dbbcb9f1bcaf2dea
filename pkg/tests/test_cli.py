import json

import pytest

from fdstab.catalog import leapfrog
from fdstab.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_PASS, main
from fdstab.schemefile import dump_scheme


def run_cli(tmp_path, *args, name="report.json"):
    out = tmp_path / name
    status = main(list(args) + ["--out", str(out)])
    return status, (json.loads(out.read_text()) if out.exists() else None), out


def test_analyze_leapfrog(tmp_path):
    status, rep, _ = run_cli(tmp_path, "analyze", "--scheme", "leapfrog")
    assert status == EXIT_PASS
    assert rep["verdict"] == "pass" and rep["data"]["crossings"] == []
    assert {c["name"] for c in rep["checks"]} >= {"roots_in_closed_disk", "edge_symbol_roots_inside"}


def test_analyze_ab3_reports_crossings(tmp_path):
    status, rep, _ = run_cli(tmp_path, "analyze", "--scheme", "ab3_centered")
    assert status == EXIT_PASS
    assert len(rep["data"]["crossings"]) == 2


def test_forms_at_crossing(tmp_path):
    status, rep, _ = run_cli(tmp_path, "forms", "--scheme", "ab3_centered", "--theta", "0")
    assert status == EXIT_PASS
    assert rep["data"]["regime"] == "multiple"
    assert len(rep["data"]["qe"]["re"]) == 3 and len(rep["data"]["qd"]["im"]) == 3


def test_unknown_key_is_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(dump_scheme(leapfrog()).replace("[[boundary]]\n", "[[boundary]]\nbogus = 1\n"))
    status, rep, _ = run_cli(tmp_path, "analyze", "--scheme", str(bad))
    assert status == EXIT_CONFIG and rep is None
    assert "unknown key 'bogus'" in capsys.readouterr().err


def test_out_of_range_parameter(tmp_path):
    status, _, _ = run_cli(tmp_path, "forms", "--scheme", "leapfrog", "--epsilon", "0.5")
    assert status == EXIT_CONFIG


def test_hypothesis_violation_status(tmp_path, capsys):
    status, _, _ = run_cli(tmp_path, "trace", "--scheme", "lax_friedrichs", "--samples", "20",
                           "--trace-samples", "10")
    assert status == EXIT_HYPOTHESIS
    assert "EdgeSymbolVanishes" in capsys.readouterr().err


def test_failing_verdict_status(tmp_path):
    status, rep, _ = run_cli(tmp_path, "analyze", "--scheme", "wave_leapfrog")
    assert status == EXIT_FAIL and rep["verdict"] == "fail"


@pytest.mark.parametrize("args", [
    ("cauchy", "--scheme", "ab3_centered", "--grid", "32", "--steps", "20"),
    ("ibvp", "--scheme", "leapfrog", "--dt", "1/50,1/100"),
    ("aux", "--scheme", "leapfrog", "--dt", "1/50,1/100", "--gamma", "1"),
    ("trace", "--scheme", "leapfrog", "--samples", "100", "--trace-samples", "500"),
    ("superpose", "--scheme", "ab3_centered", "--instances", "3", "--steps", "15"),
])
def test_reports_are_deterministic_and_consistent(tmp_path, args):
    s1, r1, p1 = run_cli(tmp_path, *args, "--seed", "4", name="a.json")
    s2, r2, p2 = run_cli(tmp_path, *args, "--seed", "4", name="b.json")
    assert p1.read_bytes() == p2.read_bytes()
    assert s1 == s2
    passed = all(c["verdict"] == "pass" for c in r1["checks"])
    assert (s1 == EXIT_PASS) == passed
    assert all("tolerance" in c for c in r1["checks"])
    assert r1["schema_version"] == 1 and "timing_seconds" not in r1


def test_csv_and_timing(tmp_path):
    csv = tmp_path / "series.csv"
    status, rep, _ = run_cli(tmp_path, "cauchy", "--scheme", "leapfrog", "--grid", "16", "--steps", "5",
                             "--csv", str(csv), "--timing")
    assert status == EXIT_PASS and rep["timing_seconds"] >= 0
    assert csv.read_text().splitlines()[0] == "step,E,D,sup_norm,L_residual"


def test_stdout_report(capsys):
    assert main(["forms", "--scheme", "leapfrog", "--theta", "0.5"]) == EXIT_PASS
    assert json.loads(capsys.readouterr().out)["command"] == "forms"
