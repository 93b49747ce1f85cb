import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rhoest.harness.cli import main
from rhoest.harness.config import ConfigError, ExperimentConfig, load_config
from rhoest.harness.experiments import REGISTRY, deviation_bound, get_experiment, nearest_lattice_counts
from rhoest.harness.report import CSV_HEADER, Record, estimate_risk, format_estimate, records_csv
from rhoest.harness.runner import run_experiment


def test_estimate_risk_examples():
    r = estimate_risk([2.0, 2.0, 2.0])
    assert r["sd"] == 0.0 and r["mean"] == 2.0
    r = estimate_risk([0.0, 1.0])
    assert r["mean"] == 0.5
    assert r["sd"] == pytest.approx(math.sqrt(0.5))
    assert r["se"] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        estimate_risk([])


def test_estimate_risk_nearest_rank():
    vals = list(range(1, 101))
    r = estimate_risk(vals)
    assert (r["q50"], r["q90"], r["q99"]) == (50, 90, 99)
    assert estimate_risk([7.0])["q99"] == 7.0
    assert math.isnan(estimate_risk([7.0])["se"])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_estimate_risk_matches_numpy(vals):
    r = estimate_risk(vals)
    assert r["mean"] == pytest.approx(np.mean(vals), abs=1e-6)
    assert r["se"] == pytest.approx(np.std(vals, ddof=1) / math.sqrt(len(vals)), abs=1e-6)


def test_record_row_format():
    rec = Record("e", "s", 3, 9, "rho_psi1", format_estimate([0.1, 2.0]), h2_loss=0.25,
                 flags={"b": True, "a": 0})
    assert rec.row() == ["e", "s", "3", "9", "rho_psi1", "0.1;2.0", "0.25", "", "", "a=0;b=1"]
    assert format_estimate(None) == "nan"
    text = records_csv([rec])
    assert text.startswith(",".join(CSV_HEADER) + "\n")
    assert "\r" not in text


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("outlier_uniform_scale", reps=0)
    with pytest.raises(ConfigError):
        ExperimentConfig("outlier_uniform_scale", psi=("halflog",))
    with pytest.raises(ConfigError):
        ExperimentConfig("outlier_uniform_scale", estimators=("bayes",))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "x", "colour": 1})
    cfg = ExperimentConfig("gaussian_submodel").override(reps=5, seed=None)
    assert cfg.reps == 5 and cfg.seed == ExperimentConfig("x").seed


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig("contamination_density", n=50, reps=3, params={"eps": [0.0, 0.1]})
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert load_config(p) == cfg
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")


def test_experiment_rejects_inapplicable_settings():
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig("nope"))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig("gaussian_submodel", estimators=("least_squares",)))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig("gaussian_submodel", params={"colour": 1}))
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig("approx_model_mixture", reps=1, params={"alphas": [0.6]}))


def test_registry_names():
    assert list(REGISTRY) == [
        "outlier_uniform_scale", "unbounded_likelihood_translation", "gaussian_submodel",
        "pathological_mle", "approx_model_mixture", "contamination_density",
        "equidistribution_outliers", "convex_mle_equivalence", "regression_heavy_tail",
        "exponential_truncation_check",
    ]
    assert get_experiment("gaussian_submodel").n == 128


def test_deviation_bound_value():
    assert deviation_bound(100, 0.1, 5) == pytest.approx(math.exp(-32) + 2 * math.exp(-4.5))
    assert deviation_bound(100, 0.1, 5) == pytest.approx(0.02222, abs=1e-5)


def test_nearest_lattice_counts():
    assert nearest_lattice_counts([1, 1, 1], 50) == (17, 17, 16)
    assert nearest_lattice_counts([10, 0], 50) == (50, 0)
    assert sum(nearest_lattice_counts([3, 5, 7, 11], 50)) == 50


def test_report_records_and_summary():
    rep = run_experiment(ExperimentConfig("gaussian_submodel", reps=4))
    assert {r.estimator for r in rep.records} == {"mle", "rho_psi1", "rho_psi2"}
    assert [r.rep for r in rep.records] == sorted(r.rep for r in rep.records)
    s = rep.summary["theta0=k^(1/4)"]["rho_psi1"]["sq_loss"]
    vals = [r.sq_loss for r in rep.records if r.setting == "theta0=k^(1/4)" and r.estimator == "rho_psi1"]
    assert s["mean"] == pytest.approx(np.mean(vals))


def test_psi_subset_reported():
    rep = run_experiment(ExperimentConfig("contamination_density", reps=2, psi=("psi2",)))
    assert {r.estimator for r in rep.records} == {"rho_psi2", "mle"}


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in REGISTRY)


def test_cli_run_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "pathological_mle", "reps": 50, "params": {"extra_n": []}}))
    assert main(["run", "pathological_mle", "--config", str(cfg), "--reps", "5", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(io.StringIO((tmp_path / "pathological_mle" / "records.csv").read_text())))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 6
    summary = json.loads((tmp_path / "pathological_mle" / "summary.json").read_text())
    assert summary["config"]["reps"] == 5
    assert "checks" in summary and "wall_time_s" in summary


def test_cli_config_errors(tmp_path, capsys):
    assert main(["run", "no_such_experiment", "--out", str(tmp_path)]) == 2
    assert main(["run", "gaussian_submodel", "--reps", "0", "--out", str(tmp_path)]) == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "pathological_mle"}))
    assert main(["run", "gaussian_submodel", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["verify", "no_such_suite"]) == 2


def test_cli_verify_subset(capsys):
    assert main(["verify", "psi_axioms", "hellinger_invariants"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "all checks passed" in out


@pytest.mark.parametrize("name", ["approx_model_mixture", "contamination_density", "convex_mle_equivalence"])
def test_thread_count_does_not_change_records(name):
    a = run_experiment(ExperimentConfig(name, reps=6, threads=1))
    b = run_experiment(ExperimentConfig(name, reps=6, threads=4))
    assert records_csv(a.records) == records_csv(b.records)
