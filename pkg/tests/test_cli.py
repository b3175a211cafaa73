import csv
import io
import json
import subprocess
import sys

import pytest

from slpconv.cli import RunRecord, main
from slpconv.reference import load_table1


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_one_mode(capsys):
    code, out, _ = run(capsys, "solve", "--N", "0", "--a2", "9.711", "--n", "1", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["Ra"] == pytest.approx(1749.95727, abs=0.05)
    assert set(row) == {"command", "params", "Ra", "a2_star", "oracle_Ra"}


def test_solve_usage_errors(capsys):
    assert run(capsys, "solve", "--N", "0", "--a2", "-1", "--n", "1")[0] == 1
    assert run(capsys, "solve", "--N", "0", "--a2", "9", "--n", "0")[0] == 1
    assert run(capsys, "solve", "--a2", "abc")[0] == 1
    assert run(capsys, "nonsense")[0] == 1


@pytest.mark.xfail(strict=True, reason="printed reference value is the n=2 truncation; n=8 is 3.1% lower")
def test_solve_n8_matches_printed_row(capsys):
    code, out, _ = run(capsys, "solve", "--N", "12", "--a2", "9", "--n", "8", "--format", "json")
    assert json.loads(out)["rows"][0]["Ra"] == pytest.approx(1455.482384, rel=5e-3)


def test_solve_n8_value(capsys):
    code, out, _ = run(capsys, "solve", "--N", "12", "--a2", "9", "--n", "8", "--format", "json")
    assert code == 0
    assert json.loads(out)["rows"][0]["Ra"] == pytest.approx(1410.6066, abs=1e-3)


def test_table_csv_header_and_rows(capsys):
    code, out, _ = run(capsys, "table", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["N", "a2", "Ra_paper", "Ra_computed", "rel_dev"]
    assert len(rows) == 15


def test_table_one_mode(capsys):
    code, out, _ = run(capsys, "table", "--n", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    first = doc["rows"][0]
    assert abs(first["Ra_computed"] - first["Ra_paper"]) < 0.05
    assert first["n_reproducing"] == 1
    assert all(r["n_reproducing"] == 2 for r in doc["rows"][1:])


def test_table_gate_failure_exit(capsys):
    code, out, _ = run(capsys, "table", "--n-converged", "2", "--format", "human")
    assert code == 3
    assert "GATE FAILED" in out


@pytest.mark.xfail(strict=True, reason="converged Ra sits 2.4-3.5% below every printed row")
def test_table_converged_within_half_percent_of_print(capsys):
    code, out, _ = run(capsys, "table", "--n", "12", "--format", "json")
    assert all(abs(r["rel_dev"]) < 5e-3 for r in json.loads(out)["rows"])


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", "--N", "0", "--a2-min", "6", "--a2-max", "14",
                       "--steps", "17", "--n", "10", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 17
    ra = [float(r["Ra"]) for r in rows]
    j = ra.index(min(ra))
    assert 0 < j < 16
    assert all(b < a for a, b in zip(ra[: j + 1], ra[1 : j + 1]))
    assert all(b > a for a, b in zip(ra[j:], ra[j + 1 :]))


def test_critical(capsys):
    code, out, _ = run(capsys, "critical", "--N", "0", "--n", "12", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["a2_star"] == pytest.approx(9.7115, abs=1e-3)
    assert row["Ra"] == pytest.approx(1707.762, abs=1e-2)


def test_critical_no_interior_minimum(capsys):
    code, _, err = run(capsys, "critical", "--N", "0", "--n", "4", "--a2-min", "12", "--a2-max", "18")
    assert code == 2 and "solver failure" in err


def test_profile(capsys):
    args = ["profile", "--theta0", "300", "--dtheta", "10", "--eta", "2", "--k", "1", "--h", "1", "--format", "csv"]
    code, out, _ = run(capsys, *args, "--z", "-0.5")
    assert code == 0 and out.splitlines()[1] == "-0.5,300"
    code, out, _ = run(capsys, *args, "--z", "0.5")
    assert out.splitlines()[1] == "0.5,290"
    assert run(capsys, *args, "--z", "0.9")[0] == 1


def test_verify_quick(capsys, tmp_path):
    dump = tmp_path / "ip.csv"
    code, out, _ = run(capsys, "verify", "--level", "quick", "--dump-table", str(dump))
    assert code == 0
    assert "all suites passed" in out
    assert dump.read_text().startswith("kind,i,k,numerator,denominator\n")


def test_verify_failure_exit(capsys, monkeypatch):
    from slpconv import cli
    from slpconv.verification import CheckResult

    monkeypatch.setattr(cli, "run_suites", lambda level: [CheckResult("chandrasekhar", False, "broken")])
    code, out, err = run(capsys, "verify")
    assert code == 3 and "chandrasekhar" in err


def test_output_is_deterministic(capsys):
    args = ["curve", "--a2-min", "8", "--a2-max", "11", "--steps", "4", "--n", "6"]
    for fmt in ("csv", "json"):
        first = run(capsys, *args, "--format", fmt)[1]
        second = run(capsys, *args, "--format", fmt)[1]
        assert first == second


def test_timestamps_only_in_meta(capsys):
    code, out, _ = run(capsys, "solve", "--a2", "10", "--n", "3", "--format", "json", "--timestamps")
    doc = json.loads(out)
    assert "timestamps" in doc["meta"]
    assert all("timestamps" not in r for r in doc["rows"])


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.csv"
    assert main(["solve", "--a2", "10", "--n", "2", "--format", "csv", "--out", str(target)]) == 0
    assert target.read_text().startswith("N,a2,n,Ra")


def test_run_record_round_trip():
    rec = RunRecord("solve", {"N": 1.0, "a2": 10.0, "n": 12}, 1704.995, oracle_Ra=1704.99,
                    timestamps={"started": "t0", "finished": "t1"})
    text = rec.to_json()
    back = RunRecord.from_json(text)
    assert back == rec and back.to_json() == text
    assert set(rec.to_dict()) == {"command", "params", "Ra", "a2_star", "oracle_Ra", "timestamps"}


def test_fixture_has_fourteen_rows():
    rows = load_table1()
    assert len(rows) == 14
    assert (rows[0].N, rows[0].a2, rows[0].Ra_legendre) == (0.0, 9.711, 1749.95727)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "slpconv", "solve", "--a2", "-3"],
                         capture_output=True, text=True)
    assert res.returncode == 1
