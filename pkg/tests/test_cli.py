import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fastmdp import cli, export
from fastmdp.engagement import ScenarioConfig


def test_seed_derivation(tmp_path):
    m = cli.parse_cli(["run", "--blue", "1", "--red", "1", "--trials", "20", "--seed", "7", "--out", str(tmp_path)])
    assert m.seeds == tuple(range(7, 27))
    assert m.trials == 20 and m.out_dir == tmp_path
    assert (m.config.blue_count, m.config.red_count) == (1, 1)


@pytest.mark.parametrize(
    "args",
    [["run", "--blue", "0"], ["run", "--red", "-2"], ["run", "--trials", "0"], ["run", "--bogus"], ["run", "--dt", "0.3"]],
)
def test_usage_errors(args):
    with pytest.raises(SystemExit) as exc:
        cli.parse_cli(args)
    assert exc.value.code == 2


def test_benchmark_manifest():
    m = cli.parse_cli(["run", "--benchmark", "--blue", "10", "--red", "10", "--trials", "3"])
    assert m.benchmark and m.trials == 3 and m.seeds == (0, 1, 2)
    assert m.config.blue_count == 10


def test_manifest_invariants():
    with pytest.raises(ValueError):
        cli.RunManifest(ScenarioConfig(), 2, (1, 1), ".")
    with pytest.raises(ValueError):
        cli.RunManifest(ScenarioConfig(), 2, (1,), ".")


def test_config_file(tmp_path):
    cfg = tmp_path / "scenario.yaml"
    cfg.write_text(
        "blue_count: 2\nh_max: 300\nmax_steps: 40\n"
        "limits:\n  red:\n    V_max: 100.0\n"
        "actions:\n  blue:\n    n_x: [0, 4, 8]\n"
    )
    m = cli.parse_cli(["run", "--config", str(cfg), "--red", "3"])
    c = m.config
    assert (c.blue_count, c.red_count, c.h_max, c.max_steps) == (2, 3, 300, 40)
    assert c.red_limits.V_max == 100.0
    assert len(c.blue_actions) == 11 * 11 * 3
    bad = tmp_path / "bad.yaml"
    bad.write_text("nonsense_key: 1\n")
    with pytest.raises(SystemExit):
        cli.parse_cli(["run", "--config", str(bad)])


def run_small(out, *extra):
    argv = ["run", "--blue", "2", "--red", "2", "--trials", "2", "--seed", "5", "--max-steps", "40"]
    argv += ["--out", str(out), "--export-trajectories", "--export-events", *extra]
    return cli.main(argv)


def test_artifacts_and_determinism(tmp_path):
    assert run_small(tmp_path / "a") == 0
    assert run_small(tmp_path / "b") == 0
    for i in range(2):
        name = f"trial_{i:04d}_trajectory.csv"
        a, b = (tmp_path / "a" / name).read_bytes(), (tmp_path / "b" / name).read_bytes()
        assert a == b
        rows = export.read_trajectory(tmp_path / "a" / name)
        assert tuple(rows[0]) == export.TRAJECTORY_COLUMNS
        # every live aircraft once per step
        per_step = {}
        for r in rows:
            per_step.setdefault(r["step"], []).append(r["aircraft_id"])
        assert all(len(v) == len(set(v)) == 4 for v in per_step.values())
        assert len(per_step) == 40
        assert (tmp_path / "a" / f"trial_{i:04d}_events.jsonl").read_bytes() == (
            tmp_path / "b" / f"trial_{i:04d}_events.jsonl"
        ).read_bytes()


def test_summary_recomputed_offline(tmp_path):
    assert run_small(tmp_path) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    wins, survive, samples = {"blue": 0, "red": 0}, {"blue": [], "red": []}, []
    for i in range(2):
        events = export.read_events(tmp_path / f"trial_{i:04d}_events.jsonl")
        start = {t: sum(1 for e in events if e["kind"] == "spawn" and e["subject_team"] == t) for t in wins}
        lost = {t: sum(1 for e in events if e["kind"] in ("capture", "crash") and e["subject_team"] == t) for t in wins}
        final = events[-1]["team_scores"]
        if final["blue"] != final["red"]:
            wins[max(final, key=final.get)] += 1
        for t in wins:
            survive[t].append((start[t] - lost[t]) / start[t])
        with open(tmp_path / f"trial_{i:04d}_timings.csv") as fh:
            samples += [float(r["decision_time_us"]) for r in csv.DictReader(fh)]
    m = summary["metrics"]
    for t in wins:
        assert m[t]["p_win"] == wins[t] / 2
        assert m[t]["p_survive"] == pytest.approx(np.mean(survive[t]))
    assert m["timing"]["all"]["2v2"]["mean_ms"] == pytest.approx(np.mean(samples) / 1e3, rel=1e-9)
    assert m["timing"]["all"]["2v2"]["count"] == len(samples)


def test_trajectory_timing_flag(tmp_path):
    assert run_small(tmp_path, "--trajectory-timing") == 0
    rows = export.read_trajectory(tmp_path / "trial_0000_trajectory.csv")
    assert all(float(r["decision_time_us"]) > 0 for r in rows)


def test_benchmark_skips_exports(tmp_path):
    assert run_small(tmp_path, "--benchmark") == 0
    assert (tmp_path / "benchmark.json").exists()
    assert not list(tmp_path.glob("trial_*"))
    report = json.loads((tmp_path / "benchmark.json").read_text())
    assert report["metrics"]["timing"]["all"]["2v2"]["mean_ms"] > 0


def test_failing_trial_reported(tmp_path, monkeypatch):
    real = cli.run_episode

    def flaky(config):
        if config.seed == 6:
            raise RuntimeError("boom")
        return real(config)

    monkeypatch.setattr(cli, "run_episode", flaky)
    assert run_small(tmp_path) == 1
    report = json.loads((tmp_path / "summary.json").read_text())
    assert report["failed_trials"] == 1
    assert "boom" in report["trials"][1]["error"]
    assert report["trials"][0]["outcome"] in ("blue_win", "red_win", "draw")


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fastmdp", "run", "--max-steps", "5", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    assert "P_win" in proc.stdout
    bad = subprocess.run([sys.executable, "-m", "fastmdp", "run", "--blue", "0"], capture_output=True, timeout=300)
    assert bad.returncode == 2
