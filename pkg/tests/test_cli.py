import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from groundlearn.harness.cli import main

CONFIG = {
    "lattice": {"sides": [4]},
    "M": 10,
    "N": 6,
    "T": 40,
    "feature_map": {"kind": "rff", "R_feat": [5], "gamma": [0.5, 0.7]},
    "solver": {"alpha": [2.0**-7, 2.0**-5]},
    "sweep": {"kind": "T", "values": [20, 40]},
    "norm": {"trials": 12, "lattices": [[4], [2, 2], [2, 3]]},
    "probe": {"instances": 2, "paulis": ["Z1 Z2", "X0 X1"]},
}
COMMANDS = ["gen-data", "train", "eval", "sweep", "verify-norm", "importance", "probe-locality"]


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(CONFIG))
    return path


def snapshot(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def run_all(config, out):
    for cmd in COMMANDS:
        assert main(["--config", str(config), "--out", str(out), "--seed", "11", cmd]) == 0, cmd


def test_every_command_is_deterministic(tmp_path, config):
    run_all(config, tmp_path / "a")
    run_all(config, tmp_path / "b")
    a, b = snapshot(tmp_path / "a"), snapshot(tmp_path / "b")
    assert a.keys() == b.keys()
    expected = {"instances.csv", "labels.csv", "dataset.json", "cv_table.csv", "eval_metrics.csv",
                "eval_predictions.csv", "metrics.csv", "metrics_observables.csv", "predictions.csv",
                "manifest.json", "norm_report.csv", "norm_reports.json", "norm_summary.json", "importance.csv",
                "importance_summary.csv", "locality.csv", "models/observable_000.json"}
    assert expected <= set(a)
    for name in a:
        assert a[name] == b[name], name


def test_outputs_carry_versioned_headers(tmp_path, config):
    run_all(config, tmp_path)
    for p in tmp_path.rglob("*.csv"):
        assert p.read_text().startswith("# groundlearn/") and " v1\n" in p.read_text().splitlines(True)[0]
    for p in (q for q in tmp_path.rglob("*.json") if q != config):
        doc = json.loads(p.read_text())
        assert doc["format"].startswith("groundlearn/") and doc["version"] == 1


def test_seed_flag_changes_outputs(tmp_path, config):
    main(["--config", str(config), "--out", str(tmp_path / "a"), "--seed", "1", "gen-data"])
    main(["--config", str(config), "--out", str(tmp_path / "b"), "--seed", "2", "gen-data"])
    assert (tmp_path / "a" / "instances.csv").read_bytes() != (tmp_path / "b" / "instances.csv").read_bytes()


def test_flags_after_the_command(tmp_path, config):
    assert main(["gen-data", "--config", str(config), "--out", str(tmp_path)]) == 0


def test_workers_do_not_change_results(tmp_path, config):
    main(["--config", str(config), "--out", str(tmp_path / "a"), "gen-data"])
    main(["--config", str(config), "--out", str(tmp_path / "b"), "--workers", "2", "gen-data"])
    assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")


def test_config_errors_exit_2(tmp_path, config):
    assert main(["--out", str(tmp_path), "gen-data"]) == 2
    assert main(["--config", str(tmp_path / "nope.json"), "--out", str(tmp_path), "gen-data"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**CONFIG, "M": 3, "N": 3}))
    assert main(["--config", str(bad), "--out", str(tmp_path), "train"]) == 2
    assert main(["--config", str(config), "--out", str(tmp_path / "fresh"), "eval"]) == 2


def test_capacity_error_exit_3(tmp_path):
    cfg = tmp_path / "big.json"
    cfg.write_text(json.dumps({**CONFIG, "lattice": {"sides": [5, 5]}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "gen-data"]) == 3
    cfg.write_text(json.dumps({**CONFIG, "lattice": {"sides": [15]}, "probe": {"instances": 1}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "probe-locality"]) == 3


@pytest.mark.skipif(shutil.which("groundlearn") is None, reason="console script not installed")
def test_console_script(tmp_path, config):
    proc = subprocess.run(["groundlearn", "--config", str(config), "--out", str(tmp_path), "gen-data"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "groundlearn.harness.cli", "--out", str(tmp_path), "train"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
