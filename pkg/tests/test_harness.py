import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from manifold_lens.harness import ConfigError, load_config, parse_config, run_experiment, trial_seed
from manifold_lens.harness.cli import main
from manifold_lens.harness.experiments import CERTIFIED, OUTSIDE, bound_flags
from manifold_lens.measures import DiscreteMeasure
from manifold_lens.transport import covariance_lipschitz_witness

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, raw, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def small(path, **exp):
    raw = json.loads((CONFIGS / path).read_text())
    raw["experiment"].update(exp)
    return raw


class TestConfig:
    @pytest.mark.parametrize("raw, field", [
        ({"experiment": {"kind": "nope"}}, "experiment.kind"),
        ({"experiment": {"trials": 0}}, "experiment.trials"),
        ({"estimator": {"eta": 1.0}}, "estimator.eta"),
        ({"estimator": {"r": -1}}, "estimator.r"),
        ({"model": {"name": "klein"}}, "model.name"),
        ({"model": {"name": "torus3d"}, "density": {"kind": "sinusoidal"}}, "density.kind"),
        ({"experiment": {"kind": "tangent", "m": 10}, "model": {"name": "sphere"}}, "estimator.r"),
        ({"model": {"name": "sphere"}, "noise": {"kind": "iid_ball", "s": 2.0}}, "noise.s"),
    ])
    def test_errors_name_field(self, raw, field):
        with pytest.raises(ConfigError) as info:
            parse_config(raw)
        assert info.value.field == field
        assert str(info.value).startswith(field)

    def test_overrides(self):
        cfg = parse_config({"experiment": {"base_seed": 1, "trials": 2}}, seed=9, trials=5, out="x.json")
        assert (cfg.base_seed, cfg.trials, cfg.output) == (9, 5, "x.json")
        assert cfg.kind == "bounds-report"

    def test_dimension_default_eta(self):
        cfg = load_config(CONFIGS / "dimension_sphere.json")
        assert cfg.estimator["eta"] == 0.05

    def test_all_committed_configs_parse(self):
        for path in sorted(CONFIGS.glob("*.json")):
            load_config(path)


def test_trial_seed_distinct():
    seeds = {trial_seed(1, t) for t in range(1000)}
    assert len(seeds) == 1000 and all(0 <= s < 2**64 for s in seeds)
    assert trial_seed(1, 0) != trial_seed(2, 0)


class TestCli:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_bad_eta(self, tmp_path, capsys):
        path = write(tmp_path, {"model": {"name": "sphere"}, "estimator": {"r": 0.3, "eta": 1.5}})
        assert main(["bounds", "--config", path]) == 2
        assert "estimator.eta" in capsys.readouterr().err

    def test_missing_config(self, capsys):
        assert main(["bounds", "--config", "/nonexistent.json"]) == 2

    def test_bounds(self, capsys):
        assert main(["bounds", "--config", str(CONFIGS / "circle.json")]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["regime"] == OUTSIDE
        tangent = report["bounds"]["tangent"]
        assert tangent["S1"] == pytest.approx(math.sin(0.1) / 528, rel=1e-12)
        assert tangent["radius_ok"] is False
        assert "wall_clock_seconds" not in report

    def test_experiment_writes_file(self, tmp_path):
        out = tmp_path / "report.json"
        cfg = write(tmp_path, small("tangent_circle.json", trials=2, m=400))
        assert main(["experiment", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["trials"] == 2 and report["schema_version"] == "manifold-lens/report/1"
        assert report["config"]["experiment"]["trials"] == 2

    def test_experiment_assertion_failure(self, tmp_path):
        raw = small("tangent_circle.json", trials=2, m=400, theta=1e-6)
        assert main(["experiment", "--config", write(tmp_path, raw), "--out", str(tmp_path / "r.json")]) == 3

    def test_trials_override(self, tmp_path):
        out = tmp_path / "r.json"
        cfg = write(tmp_path, small("lipschitz_sweep.json"))
        assert main(["experiment", "--config", cfg, "--trials", "7", "--seed", "1", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["trials"] == 7 and report["config"]["experiment"]["base_seed"] == 1

    def test_sample_and_estimate(self, tmp_path, capsys):
        raw = {"model": {"name": "sphere", "d": 1, "D": 2}, "estimator": {"r": 0.3, "rho": 0.1},
               "experiment": {"m": 500, "base_seed": 3}}
        cfg = write(tmp_path, raw)
        cloud = tmp_path / "cloud.csv"
        assert main(["sample", "--config", cfg]) == 2
        assert main(["sample", "--config", cfg, "--out", str(cloud)]) == 0
        assert cloud.exists() and cloud.with_suffix(".json").exists()
        capsys.readouterr()
        table = tmp_path / "points.csv"
        assert main(["estimate", "--config", cfg, "--cloud", str(cloud), "--out", str(table)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["processed"] == 50 and summary["max_angle"] < 0.1
        assert len(table.read_text().splitlines()) == 51

    def test_wasserstein(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        a.write_text("0.0\n2.0\n")
        b.write_text("1.0\n")
        assert main(["wasserstein", str(a), str(b)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["distance"] == pytest.approx(1.0)
        assert sorted(m["mass"] for m in out["plan"]) == pytest.approx([0.5, 0.5])
        assert main(["wasserstein", str(a), str(tmp_path / "missing.csv")]) == 2


class TestReports:
    def test_reproducible_bytes(self, monkeypatch):
        cfg = parse_config(small("lipschitz_sweep.json", trials=200))
        monkeypatch.setenv("MANIFOLD_LENS_THREADS", "1")
        one = run_experiment(cfg).to_json(include_timing=False)
        monkeypatch.setenv("MANIFOLD_LENS_THREADS", "4")
        four = run_experiment(cfg).to_json(include_timing=False)
        assert one == four

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("MANIFOLD_LENS_THREADS", "many")
        with pytest.raises(ConfigError):
            run_experiment(parse_config(small("lipschitz_sweep.json", trials=2)))

    @pytest.mark.parametrize("name", ["lipschitz_sweep.json", "concentration_ball.json", "flattening_circle.json"])
    def test_record_count_and_frequency(self, name):
        report = run_experiment(parse_config(small(name, trials=5)))
        d = report.to_dict()
        assert len(d["records"]) == 5 and 0 <= d["frequency"] <= 1
        assert "formula_version" in d and d["config"]["experiment"]["kind"] == report.kind

    def test_concentration_zero_eps(self):
        raw = small("concentration_ball.json", trials=20, eps=[0.0])
        report = run_experiment(parse_config(raw))
        row = report.bounds["table"][0]
        assert report.frequency == 1.0 and row["vacuous"] and row["bound"] >= 1
        assert report.regime == OUTSIDE and report.assertions == []

    def test_concentration_discrete_generator(self):
        raw = {"generator": {"kind": "discrete", "atoms": [[-1.0], [1.0]]},
               "experiment": {"kind": "concentration", "m": 200, "eps": [0.9], "trials": 50, "base_seed": 1}}
        report = run_experiment(parse_config(raw))
        assert report.passed and report.bounds["radius"] == 1.0

    def test_lipschitz_examples(self):
        mu = DiscreteMeasure([[-1.0], [1.0]], [0.5, 0.5])
        lhs, rhs = covariance_lipschitz_witness(mu, DiscreteMeasure.dirac([0.0]), 1.0)
        assert lhs / rhs == pytest.approx(1 / 8)
        assert covariance_lipschitz_witness(mu, mu, 1.0)[1] == pytest.approx(0.0, abs=1e-15)

    def test_lipschitz_skips_recorded(self):
        report = run_experiment(parse_config(small("lipschitz_sweep.json", trials=300)))
        for rec in report.records:
            assert (rec["ratio"] is None) == (rec["rhs"] == 0)
        assert report.summary["violations"] == 0 and report.passed

    def test_planar_tangent_and_dimension(self):
        base = {"model": {"name": "disk", "d": 2, "D": 3, "R": 1.0},
                "estimator": {"r": 10.0, "k": 2, "rho": 1.0}}
        tangent = run_experiment(parse_config({**base, "experiment": {"kind": "tangent", "m": 20, "trials": 1}}))
        assert tangent.records[0]["max_angle"] <= 1e-9 and tangent.frequency == 1.0
        dim = run_experiment(parse_config({**base, "experiment": {"kind": "dimension", "m": 50, "trials": 3}}))
        assert dim.frequency == 1.0
        assert tangent.bounds["applicable"] is False and tangent.regime == OUTSIDE

    def test_flat_disk_flattening(self):
        # local sample and discretization share one law, so W1 tracks eps_mc
        raw = {"model": {"name": "disk", "d": 2, "D": 3, "R": 1.0}, "estimator": {"r": 0.3},
               "experiment": {"kind": "flattening", "n_loc": 200, "trials": 20, "base_seed": 2,
                              "expect_frequency": 0.0}}
        report = run_experiment(parse_config(raw))
        w1 = np.mean([r["w1"] for r in report.records])
        eps = np.mean([r["eps_mc"] for r in report.records])
        assert report.bounds["bound"] == 0.0
        assert 0.7 * eps <= w1 <= 1.3 * eps

    def test_flattening_regime(self):
        raw = small("flattening_circle.json", trials=1)
        raw["estimator"]["r"] = 0.5
        with pytest.raises(ConfigError, match="estimator.r"):
            run_experiment(parse_config(raw))

    def test_bounds_report_projector(self):
        raw = json.loads((CONFIGS / "circle.json").read_text())
        raw["experiment"].update(modes=["projector"], eps=0.5)
        report = run_experiment(parse_config(raw))
        est = report.bounds["u0_estimate"]
        assert est["certified"] is False and 0 < est["u0"] <= 1
        assert report.bounds["projector"]["required_ratio"] > 0

    def test_bound_flags_certified_with_override(self):
        raw = {"model": {"name": "sphere", "d": 1, "D": 2}, "estimator": {"r": 1e-4},
               "experiment": {"m": 10**15}}
        flags, regime = bound_flags(parse_config(raw), "tangent")
        assert flags["radius_ok"] and regime in (CERTIFIED, OUTSIDE)
        assert (regime == CERTIFIED) == bool(flags["sample_ok"])

    def test_config_echo_excludes_output(self):
        cfg = parse_config({"experiment": {"kind": "lipschitz", "trials": 2}}, out="x.json")
        report = run_experiment(replace(cfg))
        assert "output" not in report.config
