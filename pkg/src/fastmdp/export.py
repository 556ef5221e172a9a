"""Trajectory CSV, events JSONL, timing CSV and summary report writers."""

import csv
import json

TRAJECTORY_COLUMNS = (
    "step",
    "time_s",
    "aircraft_id",
    "team",
    "x_m",
    "y_m",
    "altitude_m",
    "v_mps",
    "gamma_rad",
    "psi_rad",
    "phi_rad",
    "alpha_rad",
    "action_index",
    "chosen_value",
    "decision_time_us",
)
TIMING_COLUMNS = ("step", "aircraft_id", "team", "decision_time_us")


def fmt(value):
    """Float with 17 significant digits (round-trips exactly)."""
    return format(float(value), ".17g")


def write_trajectory(path, telemetry, include_timing=False):
    """One row per live aircraft per step.

    ``decision_time_us`` is left blank unless ``include_timing`` is set, so
    that reruns of a seeded scenario produce identical bytes.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for r in telemetry:
            s = r.state
            w.writerow(
                (
                    r.step,
                    fmt(r.time_s),
                    r.aircraft_id,
                    r.team,
                    fmt(s.x),
                    fmt(s.y),
                    fmt(s.altitude),
                    fmt(s.V),
                    fmt(s.gamma),
                    fmt(s.psi),
                    fmt(s.phi),
                    fmt(s.alpha),
                    r.action_index,
                    fmt(r.chosen_value),
                    fmt(r.decision_time * 1e6) if include_timing else "",
                )
            )


def write_timings(path, telemetry):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_COLUMNS)
        for r in telemetry:
            w.writerow((r.step, r.aircraft_id, r.team, fmt(r.decision_time * 1e6)))


def event_record(event, teams):
    return {
        "kind": event.kind,
        "step": event.step,
        "subject_id": event.subject_id,
        "subject_team": teams.get(event.subject_id),
        "pursuer_id": event.pursuer_id,
        "team_scores": dict(event.team_scores),
    }


def write_events(path, events, teams):
    """``teams`` maps aircraft id to team name."""
    with open(path, "w") as fh:
        for e in events:
            fh.write(json.dumps(event_record(e, teams), sort_keys=True) + "\n")


def read_events(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def read_trajectory(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_summary(path, summary):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
