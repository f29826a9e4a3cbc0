import csv
import json

import numpy as np
import pytest

from radialhj import ProblemParams, derive_constants
from radialhj.cli import EXIT_CHECKS, EXIT_ERROR, EXIT_OK, main


def table(text):
    rows = list(csv.DictReader(text.splitlines()))
    return {k: np.array([float(r[k]) if r[k] else np.nan for r in rows]) for k in rows[0]}


def write_cfg(path, body):
    path.write_text(body)
    return str(path)


def test_steady_theta_one_is_zero(capsys):
    assert main(["steady", "--theta", "1", "--samples", "11"]) == EXIT_OK
    t = table(capsys.readouterr().out)
    assert len(t["r"]) == 11
    assert np.all(t["w"] == 0) and np.all(t["dw"] == 0)


def test_steady_theta_zero_matches_closed_form(capsys, tmp_path):
    out = tmp_path / "w0.csv"
    assert main(["steady", "--p", "2", "--q", "0.5", "--dim", "2", "--theta", "0", "--out", str(out)]) == EXIT_OK
    t = table(out.read_text())
    c = derive_constants(ProblemParams(2.0, 0.5, 2))
    np.testing.assert_allclose(t["w"], c.c0 / c.alpha * (1 - t["r"] ** c.alpha), rtol=1e-10, atol=1e-14)
    inner = ~np.isnan(t["first_integral_residual"])
    assert inner.sum() == 99
    assert np.max(np.abs(t["first_integral_residual"][inner])) < 1e-8


def test_steady_from_max_value_at_cap(capsys):
    c = derive_constants(ProblemParams(2.0, 0.5, 2))
    assert main(["steady", "--max-value", repr(c.c0 / c.alpha), "--samples", "5"]) == EXIT_OK
    err = capsys.readouterr().err
    assert err.startswith("theta = ")
    assert float(err.split("=")[1]) == pytest.approx(0.0, abs=1e-8)


def test_max_value_out_of_range_is_an_error(capsys):
    assert main(["steady", "--max-value", "1.0"]) == EXIT_ERROR
    doc = json.loads(capsys.readouterr().err)
    assert doc["error"] == "ValueError" and "c0/alpha" in doc["message"]


def test_invert_round_trip(capsys):
    assert main(["invert", "--p", "3", "--q", "1", "--theta", "0.4"]) == EXIT_OK
    M = float(capsys.readouterr().out)
    assert main(["invert", "--p", "3", "--q", "1", "--max-value", repr(M)]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(0.4, abs=1e-9)


def test_bad_parameters_exit_2(capsys):
    assert main(["invert", "--p", "2", "--q", "1.5", "--theta", "0.2"]) == EXIT_ERROR
    assert "q < p - 1" in json.loads(capsys.readouterr().err)["message"]


def test_verify_unknown_suite_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonsense"])
    assert exc.value.code == 2


def test_verify_envelope_suite(capsys):
    assert main(["verify", "--suite", "envelopes"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and doc["suite"] == "envelopes"


ZERO = """
[grid]
n = 32
[time]
t_end = 0.2
outputs = 8
[initial]
profile = zero
"""

STEADY = """
[grid]
n = 128
[time]
t_end = 0.3
outputs = 12
[initial]
profile = steady
theta = 0.3
"""


def test_simulate_zero(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "zero.ini", ZERO)
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["theta_fit"] == 1.0 and report["converged"]
    for name in ("config.ini", "trajectory.csv", "distance.csv", "summary.json", "report.json"):
        assert (out / name).is_file()


def test_simulate_steady_stays(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "s.ini", STEADY)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["theta_fit"] == pytest.approx(0.3, abs=2e-2)
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["passed"] and summary["schema"] == 1


def test_simulate_bad_config_writes_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "bad.ini", "[problem]\np = 2\nq = 3\n")
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_ERROR
    doc = json.loads(capsys.readouterr().err)
    assert doc["error"] == "ConfigError"
    assert json.loads((out / "error.json").read_text()) == doc


def test_simulate_missing_config(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "o")]) == EXIT_ERROR
    assert "not found" in json.loads(capsys.readouterr().err)["message"]


def test_outputs_reproducible_up_to_timestamp(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "s.ini", STEADY)
    for tag in "ab":
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / tag)]) == EXIT_OK
    for name in ("config.ini", "trajectory.csv", "distance.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    sa, sb = (json.loads((tmp_path / t / "summary.json").read_text()) for t in "ab")
    sa.pop("metadata"), sb.pop("metadata")
    assert sa == sb


def test_sweep_row_matches_simulate(tmp_path, capsys):
    body = STEADY + f"[output]\ndir = {tmp_path / 'sw'}\n[sweep]\ntheta = 0.3\n"
    cfg = write_cfg(tmp_path / "sw.ini", body)
    assert main(["sweep", "--config", cfg]) == EXIT_OK
    csv_path = capsys.readouterr().out.strip()
    rows = list(csv.DictReader(open(csv_path)))
    assert len(rows) == 1

    single = write_cfg(tmp_path / "single.ini", STEADY)
    main(["simulate", "--config", single, "--out", str(tmp_path / "single")])
    report = json.loads(capsys.readouterr().out)
    assert float(rows[0]["theta_fit"]) == report["theta_fit"]
    assert float(rows[0]["final_distance"]) == report["final_distance"]
    run_dir = tmp_path / "sw" / rows[0]["key"]
    assert (run_dir / "trajectory.csv").read_bytes() == (tmp_path / "single" / "trajectory.csv").read_bytes()


def test_sweep_records_failing_rows(tmp_path, capsys):
    body = f"[grid]\nn = 32\n[time]\nt_end = 0.05\noutputs = 8\n[output]\ndir = {tmp_path / 'sw'}\n" \
           "[sweep]\namplitude = 0.01, 1e9\n"
    cfg = write_cfg(tmp_path / "sw.ini", body)
    code = main(["sweep", "--config", cfg, "--jobs", "2"])
    rows = list(csv.DictReader(open(capsys.readouterr().out.strip())))
    assert len(rows) == 2
    assert code == EXIT_CHECKS
    assert any(r["error"] for r in rows) or any(r["passed"] == "False" for r in rows)
