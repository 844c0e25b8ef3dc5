import csv
import json

import pytest

from maxstable_lab.harness.config import EXPERIMENTS, default_config
from maxstable_lab.harness.experiments import RUNNERS, run_experiment

SMALL = {
    "marginal": dict(n=2000, paths=200, truncation_J=50),
    "fidi": dict(n=2000, paths=200, truncation_J=50),
    "hitting": dict(n=2000, paths=500),
    "selfsim": dict(paths=2000),
    "maxinc": dict(paths=2000),
    "timechange": dict(paths=2000),
    "vnseq": dict(paths=500),
    "rates": dict(n=10**4),
}


def test_every_experiment_has_a_runner():
    assert set(RUNNERS) == set(EXPERIMENTS)


@pytest.mark.parametrize("exp", EXPERIMENTS)
def test_outputs_and_schema(exp, tmp_path):
    res = run_experiment(default_config(exp, output_dir=str(tmp_path), **SMALL[exp]))
    out = tmp_path / exp
    report = json.loads((out / "report.json").read_text())
    assert [r["name"] for r in report] == [r.name for r in res.reports]
    assert all(set(r) >= {"statistic", "sample_size", "level", "threshold", "pass", "context"} for r in report)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["experiment_id"] == exp
    assert manifest["master_seed"] == res.config.master_seed
    assert {"numpy", "scipy", "python", "kernel_backend"} <= set(manifest["versions"])
    assert manifest["wall_time_s"] >= 0
    assert manifest["all_passed"] == res.all_passed
    with open(out / "curves.csv") as fh:
        header = next(csv.reader(fh))
    assert header[-4:] == ["x", "F_exact", "F_limit", "F_empirical"]
    with open(out / "samples.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) > 1


@pytest.mark.parametrize("exp", ["marginal", "fidi"])
def test_manifest_records_truncation(exp, tmp_path):
    res = run_experiment(default_config(exp, output_dir=str(tmp_path), **SMALL[exp]))
    assert res.manifest["truncation_J"] == 50
    assert set(res.manifest["j_stability"]) >= {"statistic", "threshold", "pass"}


@pytest.mark.parametrize("exp", ["hitting", "maxinc", "marginal", "vnseq"])
def test_worker_count_does_not_change_bytes(exp, tmp_path):
    files = {}
    for workers in (1, 3):
        d = tmp_path / f"w{workers}"
        run_experiment(default_config(exp, output_dir=str(d), workers=workers, **{**SMALL[exp], "paths": 1100}))
        files[workers] = {f: (d / exp / f).read_bytes() for f in ("samples.csv", "curves.csv", "report.json")}
    assert files[1] == files[3]


def test_seed_changes_samples(tmp_path):
    a = run_experiment(default_config("selfsim", output_dir=str(tmp_path / "a"), **SMALL["selfsim"]))
    b = run_experiment(default_config("selfsim", output_dir=str(tmp_path / "b"), master_seed=1, **SMALL["selfsim"]))
    assert a.files["samples"].read_bytes() != b.files["samples"].read_bytes()


def test_fidi_custom_thresholds(tmp_path):
    cfg = default_config("fidi", output_dir=str(tmp_path), grid=(0.5, 1.0), thresholds=(1.0, 2.0),
                         **SMALL["fidi"])
    res = run_experiment(cfg)
    assert [r.name for r in res.reports] == ["fidi_spec0", "fidi_J_stability"]


def test_rates_table_contents(tmp_path):
    res = run_experiment(default_config("rates", output_dir=str(tmp_path), n=10**5))
    with open(res.files["samples"]) as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["n"]) for r in rows] == [10, 1000, 100000]
    for r in rows:
        assert abs(float(r["b_n_alpha"]) - float(r["w_n"])) <= 1e-10 * float(r["w_n"])
