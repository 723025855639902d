import csv
import io
import json

import pytest
from click.testing import CliRunner

from qcalc.cli import main, parse_poly, parse_range
from qcalc.errors import InvalidConfig
from qcalc.qcore import ZqPoly


@pytest.fixture
def run(monkeypatch):
    monkeypatch.delenv("QCALC_THREADS", raising=False)
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env)

    return invoke


def test_qanalog_and_cyclotomic(run):
    result = run("qanalog", "factorial", "3")
    assert result.exit_code == 0 and result.output.strip() == "1+2q+2q^2+q^3"
    result = run("cyclotomic", "6")
    assert result.exit_code == 0 and result.output.strip() == "1-q+q^2"


def test_parsers():
    assert parse_poly("1+2q-q^3") == ZqPoly([1, 2, 0, -1])
    assert parse_poly("[1, 0, 1]") == ZqPoly([1, 0, 1])
    assert parse_range("-4..4", "window") == (-4, 4)
    with pytest.raises(InvalidConfig):
        parse_range("4..-4", "window")


def test_cohomology_csv(run):
    result = run("cohomology", "--vars", "1", "--laurent", "--m", "2", "--window", "-4..4")
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert len(rows) == 9 * 2
    by_key = {(r["multidegree"], r["degree"]): r for r in rows}
    for a in range(-4, 5):
        expected = "2" if a % 2 == 0 else "1"
        assert by_key[(str(a), "0")]["free_rank"] == expected
        assert by_key[(str(a), "1")]["free_rank"] == expected
        assert by_key[(str(a), "0")]["torsion"] == ""


def test_cohomology_deterministic_across_threads(run):
    args = ["cohomology", "--vars", "2", "--window", "-2..2", "--m", "2", "--bockstein", "--format", "json", "--no-timestamps"]
    one = run(*args, "--threads", "1")
    four = run(*args, "--threads", "4")
    assert one.exit_code == 0 and one.output == four.output
    report = json.loads(one.output)
    assert report["schema"] == "qcalc-report/1"
    assert "timestamp" not in report


def test_timestamps_present_by_default(run):
    result = run("qpd-suite", "--primes", "2,3", "--n-max", "2")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert "timestamp" in report
    assert all("wall_time" in c for c in report["checks"])


def test_env_threads_override_flag(run):
    result = run("cohomology", "--threads", "2", env={"QCALC_THREADS": "0"})
    assert result.exit_code == 2
    result = run("cohomology", "--threads", "0", env={"QCALC_THREADS": "3"})
    assert result.exit_code == 0


def test_config_precedence(run, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"m": 3, "window": "0..1", "format": "json"}))
    from_file = json.loads(run("cohomology", "--config", str(config), "--no-timestamps").output)
    assert from_file["parameters"]["m"] == "3"
    flagged = json.loads(run("cohomology", "--config", str(config), "--m", "2", "--no-timestamps").output)
    assert flagged["parameters"]["m"] == "2"
    assert flagged["config"]["window"] == "0..1"


def test_invalid_configuration_exit_code(run, tmp_path):
    assert run("cohomology", "--window", "3..1").exit_code == 2
    assert run("cohomology", "--m", "0").exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("cohomology", "--config", str(bad)).exit_code == 2
    assert run("cohomology", "--vars", "x").exit_code == 2


def test_delta_suite(run):
    result = run("delta-suite", "--primes", "2,3", "--trunc", "6", "--no-timestamps")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["pass"] and report["suite"] == "delta-suite"


def test_decalage_check(run):
    result = run("decalage-check", "--vars", "1", "--bound", "3", "--k-max", "2")
    assert result.exit_code == 0


def test_habiro_element(run):
    result = run("habiro-element", "--poly", "1+q^2", "--indices", "1..4", "--no-timestamps")
    assert result.exit_code == 0
    assert json.loads(result.output)["pass"]


def test_relative_habiro(run, tmp_path):
    spec = tmp_path / "gaussian.json"
    spec.write_text(json.dumps({"g": ["1", "0", "1"], "delta": "2"}))
    result = run("relative-habiro", str(spec), "--m", "3", "--prime-precision", "4", "--no-timestamps")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["glued_ring"]["validation"]["lifts"]["3"]["image"] == "-x"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"g": ["1", "0", "1"], "delta": "1"}))
    assert run("relative-habiro", str(bad), "--m", "3").exit_code == 2


def test_output_file_and_csv(run, tmp_path):
    out = tmp_path / "report.csv"
    result = run("qpd-suite", "--primes", "2", "--n-max", "1", "--format", "csv", "-o", str(out))
    assert result.exit_code == 0 and result.output == ""
    header = out.read_text().splitlines()[0]
    assert header == "id,pass,witness"


def test_verify_all(run):
    result = run("verify-all", "--no-timestamps", "--threads", "2")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["pass"] and len(report["checks"]) == 12
