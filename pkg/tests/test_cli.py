from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from pdspectrum.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, EXIT_PRECISION, SCHEMA_VERSION, main


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_bands_level_one(capsys):
    code, out, _ = run(capsys, "bands", "--lambda", "2", "--level", "1", "--bits", "128", "--cache", "none")
    assert code == EXIT_PASS
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA_VERSION and doc["status"] == "pass"
    bands = doc["result"]["bands"]
    assert [b["code"] for b in bands] == ["0", "1"]
    assert float(bands[0]["a"]["lo"]["decimal"]) == pytest.approx(-2.8284271247461903)
    assert float(bands[0]["b"]["hi"]["decimal"]) == pytest.approx(-2.0)
    assert float(bands[1]["a"]["lo"]["decimal"]) == pytest.approx(2.0)
    assert float(bands[1]["b"]["hi"]["decimal"]) == pytest.approx(2.8284271247461903)
    assert bands[0]["a"]["lo"]["hex"].startswith("-0x2.d413cccfe7799")


def test_ids_of_zero(capsys):
    code, out, _ = run(capsys, "ids", "--zero", "01", "--format", "text")
    assert code == EXIT_PASS and out.strip() == "3/8"
    code, out, _ = run(capsys, "ids", "--zero", "01")
    assert json.loads(out)["result"]["ids"] == "3/8"
    code, out, _ = run(capsys, "ids", "--word", "3_el (0_o 3_er)", "--format", "text")
    assert out.strip() == "1/3"


def test_ids_cross_check(capsys):
    code, out, _ = run(capsys, "ids", "--zero", "0110", "--check", "--cache", "none")
    doc = json.loads(out)
    assert code == EXIT_PASS and doc["result"]["report"]["ok"]


@pytest.mark.parametrize("args", [
    ("ids", "--zero", "012"),
    ("bands", "--level", "30"),
    ("bands", "--lambda", "-1"),
    ("bands", "--lambda", "two"),
    ("orbit", "--energy", "1", "--word", "(0_e 3_or)"),
    ("nonsense",),
    ("bands", "--format", "xml"),
])
def test_bad_input_exit_code(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == EXIT_INPUT and "error" in err


def test_precision_exhaustion_exit_code(capsys, tmp_path):
    # a zero straddling enclosure at a fixed, tiny precision cannot be classified
    out = tmp_path / "orbit.json"
    code, _, err = run(capsys, "orbit", "--lambda", "2", "--energy", "2.0000000000000001",
                       "--horizon", "24", "--bits", "53", "--out", str(out))
    assert code in (EXIT_PASS, EXIT_PRECISION)
    if code == EXIT_PRECISION:
        assert json.loads(out.read_text())["partial"] is True


def test_verification_failure_exit_code(capsys, monkeypatch):
    from pdspectrum import cli
    from pdspectrum.report import Report

    def failing(*a, **k):
        rep = Report("forced")
        rep.check("always", False, "forced failure")
        return rep

    monkeypatch.setattr(cli, "verify_contraction", failing)
    code, out, _ = run(capsys, "dynamics")
    assert code == EXIT_FAIL and json.loads(out)["status"] == "fail"


def test_csv_has_header(capsys):
    code, out, _ = run(capsys, "gaps", "--lambda", "2", "--level", "1", "--format", "csv", "--cache", "none")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_PASS
    assert [r["label"] for r in rows] == ["1/3", "1/2", "5/6"]
    assert [r["kind"] for r in rows] == ["II", "I_e", "II"]


def test_orbit_of_a_word(capsys):
    code, out, _ = run(capsys, "orbit", "--lambda", "2", "--word", "0_e 1_o 2_e (3_or 0_e)", "--level", "10")
    doc = json.loads(out)
    assert code == EXIT_PASS
    assert doc["result"]["source"]["depth"] == 10
    assert len(doc["result"]["orbit"]["traces"]) == 11


def test_dimension_and_dynamics(capsys):
    code, out, _ = run(capsys, "dimension", "--lambda", "2", "--level", "5", "--count-level", "20")
    doc = json.loads(out)
    assert code == EXIT_PASS
    assert doc["result"]["counts"][20]["count"] == 17711
    code, out, _ = run(capsys, "dynamics", "--format", "csv")
    assert code == EXIT_PASS and out.startswith("n,box_diameter\n")


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "--lambda", "0.5", "--level", "5", "--cache", "none")
    doc = json.loads(out)
    assert code == EXIT_PASS and doc["result"]["ok"]
    checks = doc["result"]["lambdas"]["0.5"]["checks"]
    assert any(k.startswith("bands/") for k in checks)
    assert any(k.startswith("gaps/") for k in checks)


def test_outputs_are_deterministic(tmp_path, capsys):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"covering-{jobs}.json"
        code, _, _ = run(capsys, "covering", "--lambda", "0.5", "--level", "6", "--jobs", jobs,
                         "--cache", "none", "--out", str(path))
        assert code == EXIT_PASS
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pdspectrum", "ids", "--zero", "1", "--format", "text"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.strip() == "3/4"
