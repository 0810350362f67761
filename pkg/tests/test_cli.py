import json
import math
import subprocess
import sys

import numpy as np
import pytest

from betaplane.cli import main
from betaplane.phase import gamma_derivs, h_eval


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def test_figures_ht_matches_phase_core(tmp_path):
    out = tmp_path / "ht.csv"
    assert main(["figures", "--which", "ht", "--t", "1,2,3,4",
                 "--n", "64", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "theta", "h"]
    for t_s, th_s, h_s in rows:
        t, th, h = float(t_s), float(th_s), float(h_s)
        assert h == pytest.approx(h_eval(t, th).h, rel=1e-10, abs=1e-12)
    assert out.with_suffix(".png").exists()


def test_figures_gamma_prime(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["figures", "--which", "gamma-prime", "--t", "2",
                 "--n", "32", "--out", str(out), "--no-png"]) == 0
    _, rows = read_csv(out)
    for t_s, th_s, re_s, im_s in rows:
        g = gamma_derivs(float(t_s), float(th_s)).g1
        assert complex(float(re_s), float(im_s)) == pytest.approx(g, rel=1e-10)


def test_figures_gamma_critical(tmp_path):
    out = tmp_path / "gc.csv"
    assert main(["figures", "--which", "gamma-critical", "--t-list", "400,1600",
                 "--n", "48", "--out", str(out), "--no-png"]) == 0
    _, rows = read_csv(out)
    for t_s, q_s, v_s in rows:
        t, q = float(t_s), float(q_s)
        th = 1.0 / t + q / t**1.5
        assert float(v_s) == pytest.approx(t / abs(gamma_derivs(t, th).g1), rel=1e-10)


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["phase", "--t", "1,3", "--n", "64", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_stationary_command(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["stationary", "--t", "5", "--rho", "1", "--alpha",
                 str(math.pi), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert float(rows[0][3]) == pytest.approx(0.0, abs=1e-12)
    assert float(rows[0][4]) == pytest.approx(math.sqrt(5.0), rel=1e-12)


def test_expansions_command(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["expansions", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["side", "name", "printed_order", "fitted_order"]
    assert len(rows) == 10


def test_kappa_command(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kappa", "--t-list", "2000", "--which", "z", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[:5] == ["t", "which", "k_inf", "k_one", "k_dollar"]
    assert float(rows[0][2]) > 0.0


def test_table_command(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["table", "--t-list", "2000", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "quantity", "region", "sup_ratio", "inf_ratio",
                      "printed_sup_ratio"]
    assert len(rows) == 7 * 6 + 1


def test_usage_error_exit_code():
    result = subprocess.run([sys.executable, "-m", "betaplane.cli",
                             "figures", "--which", "nonsense"],
                            capture_output=True)
    assert result.returncode == 2


def test_verify_all_fast(tmp_path):
    out = tmp_path / "verify.json"
    code = main(["verify-all", "--fast", "--allow-known-defects",
                 "--out", str(out)])
    assert code == 0
    recs = json.loads(out.read_text())
    failing = [r for r in recs if not r["pass"]]
    assert all("known-defect" in r["ref"] for r in failing)
