import math

import numpy as np
import pytest

from hcross.errors import ConfigError
from hcross.experiments import (CSV_COLUMNS, ExperimentConfig, csv_text,
                                fit_rate, parse_config, run_inequalities,
                                run_q1P2, run_qpL1, run_qpT1, run_ST1)


# -- rate fitting -----------------------------------------------------------------

def test_fit_recovers_planted_exponents():
    # oracle: synthesize data from known alpha, gamma with >3 points
    ns = np.arange(4, 16)
    alpha, gamma, c = 0.5, 1.25, 0.37
    values = c * 2.0 ** (alpha * ns) * ns ** gamma
    fit = fit_rate(ns, values)
    assert fit.alpha == pytest.approx(alpha, abs=1e-9)
    assert fit.gamma == pytest.approx(gamma, abs=1e-9)
    assert fit.residual < 1e-10
    assert not fit.conditioning_warning or len(set(ns)) <= 3


def test_fit_three_points_warns():
    ns = [6, 9, 12]
    values = [2.0 ** (0.5 * n) * n ** 0.5 for n in ns]
    fit = fit_rate(ns, values)
    assert fit.conditioning_warning
    assert fit.alpha == pytest.approx(0.5, abs=1e-9)
    assert fit.gamma == pytest.approx(0.5, abs=1e-9)


def test_fit_requires_three_points():
    with pytest.raises(ValueError):
        fit_rate([6, 9], [1.0, 2.0])


# -- config -----------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="nope").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="qpT1", q=2.0, p=1.5).validate()  # q <= p
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="qpT1", q=2.0, p=2.0, r=0.3).validate()  # r > 1/q
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="ST1", beta=1.5).validate()
    ExperimentConfig(experiment="qpT1", q=1.0, p=2.0, r=1.5).validate()


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("""# comment
experiment = qpT1
d = 2
n_values = 6, 9, 12
q = 1.0
p = 2.0
seed = 7
timestamp = off
points = lattice
""")
    cfg = parse_config(str(path))
    assert cfg.experiment == "qpT1"
    assert cfg.n_values == (6, 9, 12)
    assert cfg.seed == 7
    assert cfg.timestamp is False
    assert cfg.points == "lattice"


def test_config_file_diagnostics(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("experiment = qpT1\nwhatkey = 3\n")
    with pytest.raises(ConfigError, match=r"bad\.cfg:2"):
        parse_config(str(path))
    path.write_text("d = notanint\n")
    with pytest.raises(ConfigError, match=r"bad\.cfg:1"):
        parse_config(str(path))
    path.write_text("just a line\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config(str(path))


# -- runners (small scales) ----------------------------------------------------------

def test_run_qpT1_small():
    cfg = ExperimentConfig(experiment="qpT1", d=1, n_values=(3, 6, 9),
                           m_values=(2, 4, 8), q=1.0, p=2.0, r=1.5, seed=0)
    rows, fit = run_qpT1(cfg)
    assert len(rows) == 3
    assert all(r["status"] == "ok" for r in rows)
    assert all(float(r["value"]) > 0 for r in rows)
    assert fit is not None


def test_run_qpT1_infeasible_rows_skipped():
    cfg = ExperimentConfig(experiment="qpT1", d=1, n_values=(3,),
                           m_values=(100,), q=1.0, p=2.0, r=1.5)
    rows, fit = run_qpT1(cfg)
    assert rows[0]["status"].startswith("skipped")
    assert fit is None


def test_run_q1P2_small():
    cfg = ExperimentConfig(experiment="q1P2", d=2, n_values=(2, 3, 4), seed=0)
    rows, fit = run_q1P2(cfg)
    assert len(rows) == 3
    assert all(float(r["value"]) > 0 for r in rows)
    assert fit is not None


def test_run_q1P2_d1_flat():
    # d = 1: single block per n, mean stays bounded, predicted term is n^0 = 1
    cfg = ExperimentConfig(experiment="q1P2", d=1, n_values=(2, 3, 4, 5), seed=0)
    rows, fit = run_q1P2(cfg)
    assert all(float(r["predicted_term"]) == 1.0 for r in rows)
    values = [float(r["value"]) for r in rows]
    assert max(values) / min(values) < 4.0  # bounded, no n^(d-1) growth
    assert fit is not None


def test_run_ST1_small():
    cfg = ExperimentConfig(experiment="ST1", d=1, n_values=(3, 6, 9),
                           m_values=(2, 4, 8), p=2.0, a=0.5, b=0.0, beta=1.0)
    rows, fit = run_ST1(cfg)
    assert len(rows) == 3
    assert all(r["status"] == "ok" for r in rows)


def test_run_qpL1_small():
    cfg = ExperimentConfig(experiment="qpL1", d=1, n_values=(2, 4), q=1.0, p=2.0)
    rows, _ = run_qpL1(cfg)
    assert len(rows) == 2
    assert all(float(r["value"]) > 0 for r in rows)


def test_run_inequalities_families():
    cfg = ExperimentConfig(experiment="inequalities", d=2, trials=50, family="all")
    rows, _ = run_inequalities(cfg)
    names = {r["experiment"] for r in rows}
    assert {"audit-sp1", "audit-s4", "audit-homogeneity"} <= names
    for r in rows:
        assert not str(r["status"]).startswith("FAIL")


# -- CSV ------------------------------------------------------------------------------

def test_csv_schema_and_determinism():
    cfg = ExperimentConfig(experiment="q1P2", d=2, n_values=(2, 3, 4), seed=3,
                           timestamp=False)
    rows1, fit1 = run_q1P2(cfg)
    rows2, fit2 = run_q1P2(cfg)
    text1 = csv_text(rows1, timestamp=False, fit=fit1)
    text2 = csv_text(rows2, timestamp=False, fit=fit2)
    assert text1 == text2
    header = text1.splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)


def test_csv_timestamp_header_optional():
    cfg = ExperimentConfig(experiment="inequalities", family="s4", trials=10)
    rows, _ = run_inequalities(cfg)
    with_ts = csv_text(rows, timestamp=True)
    without = csv_text(rows, timestamp=False)
    assert with_ts.splitlines()[0].startswith("# generated")
    assert without.splitlines()[0] == ",".join(CSV_COLUMNS)


def test_empty_range_gives_header_only():
    text = csv_text([], timestamp=False)
    assert text == ",".join(CSV_COLUMNS) + "\n"
