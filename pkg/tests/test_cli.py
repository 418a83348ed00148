import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from fracdq.bench.runner import RESULTS_HEADER, read_results
from fracdq.cli import EXIT_CONFIG, EXIT_SINGULAR, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    start = text.index(",".join(RESULTS_HEADER))
    return list(csv.DictReader(io.StringIO(text[start:])))


def test_run_ex52_reference_entry(capsys, tmp_path):
    out_csv = tmp_path / "r.csv"
    code, out, _ = run(capsys, "run", "--case", "ex52", "--rbf", "mq", "--eps", "0.1875", "--nodes", "cheb:15", "--steps", "15", "--out", str(out_csv))
    assert code == 0
    assert "einf=2.5" in out
    (row,) = read_results(out_csv)
    assert (row["case"], row["rbf"], row["M"], row["N"], row["Q"]) == ("ex52", "mq", 15, 15, 50)
    assert row["einf"] == pytest.approx(2.5379e-04, rel=0.05)
    assert row["wall_ms"] is None


def test_run_writes_csv_to_stdout(capsys):
    code, out, _ = run(capsys, "run", "--case", "ex51", "--rbf", "ga", "--M", "10")
    assert code == 0
    (row,) = csv_rows(out)
    assert float(row["e2"]) == pytest.approx(9.3444e-02, rel=0.02)
    assert row["N"] == ""


def test_duplicate_parameter_rejected(capsys):
    code, _, err = run(capsys, "run", "--case", "ex52", "--rbf", "mq", "--eps", "0.1875", "--eps", "0.2")
    assert code == EXIT_CONFIG
    assert "--eps given more than once" in err


@pytest.mark.parametrize(
    "argv,msg",
    [
        (["run", "--case", "ex52", "--eps", "0.1", "--cstar", "0.5"], "either --eps or --cstar"),
        (["run", "--case", "ex52", "--nodes", "cheb:15", "--M", "15"], "either --nodes or --M"),
        (["run", "--case", "nope"], "invalid choice"),
        (["run", "--case", "ex52", "--steps", "0"], "positive integer"),
        (["run", "--case", "ex52", "--eps", "-1"], "positive number"),
        (["run", "--case", "ex52", "--nodes", "grid:40"], "2D domain"),
        (["run", "--case", "ex52", "--rbf", "ga", "--M", "15"], "no default shape parameter"),
        (["run", "--case", "ex53i", "--alpha", "1.5"], "fixed fractional orders"),
        (["run", "--case", "ex52", "--alpha", "2.5"], "alpha"),
        (["run", "--case", "ex52", "--rbf", "tps"], "tps"),
        (["run"], "required"),
        (["weights", "--nodes", "cheb:10", "--alpha", "1.5"], "--eps or --cstar"),
        (["weights", "--nodes", "cheb:10", "--alpha", "1.5", "--eps", "0.3", "--theta", "pi/2"], "theta"),
        (["weights", "--nodes", "grid:30", "--alpha", "1.5", "--eps", "0.3", "--domain", "hexagon"], "unknown domain"),
        (["weights", "--nodes", "cheb:10", "--alpha", "x", "--eps", "0.3"], "cannot evaluate"),
    ],
)
def test_config_errors_exit_1(capsys, argv, msg):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_CONFIG
    assert err.startswith("error:")
    assert msg in err


def test_problem_rejects_alpha(capsys, tmp_path):
    path = tmp_path / "p.yaml"
    path.write_text("domain: square\n")
    code, _, err = run(capsys, "run", "--problem", str(path), "--alpha", "1.5")
    assert code == EXIT_CONFIG and "catalog cases only" in err
    code, _, err = run(capsys, "run", "--problem", str(path))
    assert code == EXIT_CONFIG and "missing keys" in err


def test_singular_system_exit_2(capsys):
    # flat Gaussian on 400 nodes: condition estimate beyond double precision
    code, _, err = run(capsys, "run", "--case", "ex55", "--rbf", "ga", "--cstar", "0.85", "--nodes", "scatter:400:seed=1", "--steps", "100")
    assert code == EXIT_SINGULAR
    assert "numerical failure" in err
    line = [ln for ln in err.splitlines() if ln.startswith("condition estimate:")][0]
    assert float(line.split(":")[1]) > 1e19


def test_ga_on_scattered_disc_completes(capsys, tmp_path):
    out_csv = tmp_path / "r.csv"
    code, _, _ = run(capsys, "run", "--case", "ex55", "--rbf", "ga", "--eps", "8.9554", "--nodes", "scatter:400:seed=1", "--steps", "100", "--out", str(out_csv))
    assert code == 0
    (row,) = read_results(out_csv)
    assert row["rbf"] == "ga" and row["N"] == 100
    assert math.isfinite(row["e2"]) and row["e2"] < 2e-3


def test_identical_invocations_identical_bytes(capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        code, _, _ = run(capsys, "run", "--case", "ex55", "--rbf", "imq", "--nodes", "scatter:120:seed=3", "--steps", "20", "--out", str(p))
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_timing_column(capsys):
    code, out, _ = run(capsys, "run", "--case", "ex52", "--M", "15", "--timing")
    assert code == 0
    assert float(csv_rows(out)[0]["wall_ms"]) > 0


def test_dump(capsys, tmp_path):
    dump = tmp_path / "d.csv"
    code, _, _ = run(capsys, "run", "--case", "ex53i", "--M", "99", "--dump", str(dump))
    assert code == 0
    lines = dump.read_text().splitlines()
    assert lines[0] == "x,y,exact,numeric,abs_err"
    assert len(lines) == 101
    errs = np.array([float(ln.split(",")[4]) for ln in lines[1:]])
    assert errs.max() <= 1e-2


def test_run_custom_problem(capsys, tmp_path):
    path = tmp_path / "p.yaml"
    path.write_text(
        "domain: interval:0:1\nhorizon: 1\n"
        "terms:\n  - {alpha: 1.5, theta: 0, kappa: 'x^1.5 * gamma(3.5) / 24'}\n"
        "source: '-2 * exp(-t) * x^4'\ninitial: 'x^4'\nboundary: 'exp(-t) * x^4'\nexact: 'exp(-t) * x^4'\n"
        "defaults: {rbf: mq, epsilon: 0.1875, nodes: 'cheb:15', steps: 15}\n"
    )
    code, out, _ = run(capsys, "run", "--problem", str(path))
    assert code == 0
    (row,) = csv_rows(out)
    assert row["case"] == "p"
    assert float(row["einf"]) == pytest.approx(2.5379e-04, rel=0.05)


def test_convergence_ex52_reference_rates(capsys):
    code, out, _ = run(capsys, "convergence", "--case", "ex52", "--rbf", "mq", "--M", "15", "20", "25", "30")
    assert code == 0
    rows = csv_rows(out)
    assert [int(r["M"]) for r in rows] == [15, 20, 25, 30]
    assert rows[0]["rate"] == ""
    for r, want in zip(rows[1:], (2.2288, 2.1770, 2.1102)):
        assert abs(float(r["rate"]) - want) <= 0.15


def test_convergence_all_kernels_ex51(capsys, monkeypatch):
    monkeypatch.setenv("FRACDQ_THREADS", "2")
    code, out, _ = run(capsys, "convergence", "--case", "ex51", "--rbf", "mq,imq,ga", "--M", "10,15,20,25")
    assert code == 0
    rows = csv_rows(out)
    for kind in ("mq", "imq", "ga"):
        e2 = [float(r["e2"]) for r in rows if r["rbf"] == kind]
        assert len(e2) == 4
        assert all(a > b for a, b in zip(e2, e2[1:]))


def test_convergence_needs_two_values(capsys):
    code, _, err = run(capsys, "convergence", "--case", "ex52", "--M", "15")
    assert code == EXIT_CONFIG and "at least two" in err
    code, _, err = run(capsys, "convergence", "--case", "ex52", "--M", "15", "15")
    assert code == EXIT_CONFIG and "distinct" in err


def test_bad_thread_setting(capsys, monkeypatch):
    monkeypatch.setenv("FRACDQ_THREADS", "many")
    code, _, err = run(capsys, "convergence", "--case", "ex52", "--M", "15", "20")
    assert code == EXIT_CONFIG and "FRACDQ_THREADS" in err


def test_weights_mq_rows_sum_to_zero(capsys, tmp_path):
    out_csv = tmp_path / "w.csv"
    code, out, _ = run(capsys, "weights", "--nodes", "cheb:10", "--rbf", "mq", "--eps", "0.3112", "--alpha", "1.2", "--theta", "pi", "--out", str(out_csv))
    assert code == 0
    assert "nodes: 11" in out and "condition estimate:" in out and "max reconstruction residual:" in out
    W = np.zeros((11, 11))
    with open(out_csv) as fh:
        for r in csv.DictReader(fh):
            W[int(r["i"]), int(r["j"])] = float(r["weight"])
    assert np.max(np.abs(W.sum(axis=1))) <= 1e-8 * np.max(np.abs(W))


def test_weights_conditioning_warning(capsys):
    code, _, err = run(capsys, "weights", "--nodes", "cheb:10", "--rbf", "imq", "--eps", "10", "--alpha", "1.2", "--theta", "pi")
    assert code == 0
    assert "warning:" in err and "exceeds 1e+12" in err


def test_weights_ga_scattered_residual(capsys):
    code, out, _ = run(capsys, "weights", "--nodes", "scatter:74", "--rbf", "ga", "--eps", "3", "--alpha", "1.5", "--theta", "pi/4")
    assert code == 0
    assert "nodes: 74" in out
    resid = float(out.split("max reconstruction residual:")[1].split()[0])
    assert resid <= 1e-6


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fracdq", "run", "--case", "ex52", "--M", "15", "--eps", "0.2", "--eps", "0.3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "given more than once" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "fracdq", "run", "--case", "ex52", "--M", "15"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == ",".join(RESULTS_HEADER)
