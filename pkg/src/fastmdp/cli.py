"""Command line entry point: configure scenarios, run trials, export results.

Example::

    fastmdp run --blue 1 --red 1 --trials 20 --seed 7 --out results/
"""

import argparse
import dataclasses
import logging
import sys
import time
import traceback
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import dynamics, export
from .engagement import ConfigError, ScenarioConfig, run_episode
from .metrics import TrialSummary, draw_fraction, p_survive, p_win, timing_summary

log = logging.getLogger("fastmdp")

_TUPLE_KEYS = ("blue_x_band", "red_x_band", "y_band", "altitude_band")


@dataclass(frozen=True)
class RunManifest:
    config: ScenarioConfig
    trials: int
    seeds: tuple
    out_dir: Path
    export_trajectories: bool = False
    export_events: bool = False
    benchmark: bool = False
    trajectory_timing: bool = False

    def __post_init__(self):
        if len(self.seeds) != self.trials:
            raise ValueError("seed list length must equal the trial count")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")


def load_config(path):
    """Read a YAML/JSON scenario file into ScenarioConfig keyword arguments.

    Top-level keys are ScenarioConfig field names.  Team envelopes and action
    grids go under ``limits: {blue: {...}, red: {...}}`` (speeds in m/s,
    angles in rad) and ``actions: {blue: {phi_dot: [...], alpha_dot: [...],
    n_x: [...]}, red: ...}``; omitted teams keep the defaults.
    """
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key == "limits":
            for team, lim in value.items():
                base = dynamics.DEFAULT_LIMITS[team]
                kwargs[f"{team}_limits"] = dataclasses.replace(base, **lim)
        elif key == "actions":
            for team, table in value.items():
                base = dynamics.DEFAULT_ACTIONS[team]
                kwargs[f"{team}_actions"] = dataclasses.replace(base, **table)
        elif key in known and not key.endswith(("_limits", "_actions")):
            kwargs[key] = tuple(value) if key in _TUPLE_KEYS else value
        else:
            raise ConfigError(f"{path}: unknown scenario key {key!r}")
    return kwargs


def _build_parser():
    parser = argparse.ArgumentParser(prog="fastmdp", description="FastMDP pursuit/evasion simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run seeded trials and write results")
    run.add_argument("--blue", type=int, help="blue team size (default 1)")
    run.add_argument("--red", type=int, help="red team size (default 1)")
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed+i")
    run.add_argument("--max-steps", type=int)
    run.add_argument("--dt", type=float)
    run.add_argument("--hmax", type=float, help="terrain height in meters")
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--export-trajectories", action="store_true")
    run.add_argument("--export-events", action="store_true")
    run.add_argument("--benchmark", action="store_true", help="time decisions only, no telemetry export")
    run.add_argument("--config", type=Path, help="YAML/JSON scenario file")
    run.add_argument(
        "--trajectory-timing",
        action="store_true",
        help="fill decision_time_us in trajectory CSVs (makes them run-dependent)",
    )
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_cli(args=None):
    """Parse arguments into a RunManifest; usage errors exit with status 2."""
    parser = _build_parser()
    ns = parser.parse_args(args)
    try:
        kwargs = load_config(ns.config) if ns.config else {}
    except (OSError, yaml.YAMLError, ConfigError, TypeError, KeyError) as exc:
        parser.error(f"bad --config: {exc}")
    overrides = {
        "blue_count": ns.blue,
        "red_count": ns.red,
        "max_steps": ns.max_steps,
        "dt": ns.dt,
        "h_max": ns.hmax,
    }
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    kwargs["seed"] = ns.seed
    if ns.trials < 1:
        parser.error("--trials must be >= 1")
    try:
        config = ScenarioConfig(**kwargs).validate()
    except (ConfigError, TypeError, ValueError) as exc:
        parser.error(str(exc))
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s")
    return RunManifest(
        config=config,
        trials=ns.trials,
        seeds=tuple(ns.seed + i for i in range(ns.trials)),
        out_dir=ns.out,
        export_trajectories=ns.export_trajectories,
        export_events=ns.export_events,
        benchmark=ns.benchmark,
        trajectory_timing=ns.trajectory_timing,
    )


def _scenario_dict(config):
    d = dataclasses.asdict(config)
    d.pop("seed")
    return d


def summarize(summaries):
    """Metrics block of the summary report."""
    report = {"draw_fraction": draw_fraction(summaries)}
    for team in ("blue", "red"):
        report[team] = {"p_win": p_win(summaries, team), "p_survive": p_survive(summaries, team)}
    timing = {}
    for team in (None, "blue", "red"):
        key = "all" if team is None else team
        try:
            timing[key] = {label: st.as_ms() for label, st in timing_summary(summaries, team).items()}
        except ValueError:
            timing[key] = None
    report["timing"] = timing
    return report


def run_trials(manifest):
    """Run every trial of ``manifest`` and write its artifacts.

    Returns 0 when all trials completed, 1 if any trial raised (the others
    still run and are reported).
    """
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    export_on = not manifest.benchmark
    summaries, trials, failed = [], [], 0
    for i, seed in enumerate(manifest.seeds):
        config = dataclasses.replace(manifest.config, seed=seed)
        t0 = time.perf_counter()
        try:
            result = run_episode(config)
        except Exception as exc:  # report and keep going
            failed += 1
            log.error("trial %d (seed %d) failed: %s", i, seed, exc)
            trials.append({"trial": i, "seed": seed, "error": "".join(traceback.format_exception_only(exc)).strip()})
            continue
        elapsed = time.perf_counter() - t0
        summary = TrialSummary.from_result(result)
        summaries.append(summary)
        stem = f"trial_{i:04d}"
        if export_on and manifest.export_trajectories:
            export.write_trajectory(out / f"{stem}_trajectory.csv", result.telemetry, manifest.trajectory_timing)
            export.write_timings(out / f"{stem}_timings.csv", result.telemetry)
        if export_on and manifest.export_events:
            export.write_events(out / f"{stem}_events.jsonl", result.events, _spawn_teams(config))
        trials.append(
            {
                "trial": i,
                "seed": seed,
                "outcome": result.outcome,
                "scores": result.scores,
                "initial_counts": result.initial_counts,
                "final_counts": result.final_counts,
                "steps": result.steps,
                "wall_time_s": elapsed,
                "mean_decision_ms": summary.mean_decision_time() * 1e3,
            }
        )
        log.info("trial %d seed %d: %s %s in %d steps", i, seed, result.outcome, result.scores, result.steps)

    report = {
        "scenario": _scenario_dict(manifest.config),
        "seeds": list(manifest.seeds),
        "benchmark": manifest.benchmark,
        "trials": trials,
        "failed_trials": failed,
        "metrics": summarize(summaries) if summaries else None,
    }
    export.write_summary(out / ("benchmark.json" if manifest.benchmark else "summary.json"), report)
    _print_report(report)
    return 1 if failed else 0


def _spawn_teams(config):
    teams = ["blue"] * config.blue_count + ["red"] * config.red_count
    return dict(enumerate(teams))


def _print_report(report):
    m = report["metrics"]
    if m is None:
        print("no trial completed")
        return
    print(f"trials: {len(report['trials'])}  failed: {report['failed_trials']}  draws: {m['draw_fraction']:.3f}")
    for team in ("blue", "red"):
        print(f"{team:5s} P_win={m[team]['p_win']:.3f}  P_s={m[team]['p_survive']:.3f}")
    timing = m["timing"]["all"] or {}
    for label, st in timing.items():
        print(
            f"{label:>8s} decision time: mean {st['mean_ms']:.3f} ms  p50 {st['p50_ms']:.3f}  "
            f"p95 {st['p95_ms']:.3f}  max {st['max_ms']:.3f}  (n={st['count']})"
        )


def main(argv=None):
    manifest = parse_cli(argv)
    try:
        return run_trials(manifest)
    except OSError as exc:
        print(f"fastmdp: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
