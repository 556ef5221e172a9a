"""Win rate, survivability and decision-time statistics over many trials."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_team

TEAMS = ("blue", "red")


@dataclass(frozen=True)
class TrialSummary:
    outcome: str  # blue_win | red_win | draw
    initial_counts: dict
    final_counts: dict
    decision_times: dict  # team -> tuple of seconds

    def __post_init__(self):
        for team in TEAMS:
            if not 0 <= self.final_counts[team] <= self.initial_counts[team]:
                raise ValueError(f"final count for {team} outside [0, initial]")

    @classmethod
    def from_result(cls, result):
        times = {t: tuple(float(v) for v in result.decision_times(t)) for t in TEAMS}
        return cls(result.outcome, dict(result.initial_counts), dict(result.final_counts), times)

    @property
    def label(self):
        return f"{self.initial_counts['blue']}v{self.initial_counts['red']}"

    def mean_decision_time(self, team=None):
        samples = self._samples(team)
        return float(np.mean(samples)) if len(samples) else float("nan")

    def max_decision_time(self, team=None):
        samples = self._samples(team)
        return float(np.max(samples)) if len(samples) else float("nan")

    def _samples(self, team):
        teams = TEAMS if team is None else (check_team(team),)
        return np.concatenate([np.asarray(self.decision_times.get(t, ()), dtype=float) for t in teams])


def _require(summaries):
    summaries = list(summaries)
    if not summaries:
        raise ValueError("need at least one trial summary")
    return summaries


def p_win(summaries, team):
    """Fraction of trials won by ``team``; draws count as non-wins."""
    summaries = _require(summaries)
    target = f"{check_team(team)}_win"
    return sum(s.outcome == target for s in summaries) / len(summaries)


def draw_fraction(summaries):
    summaries = _require(summaries)
    return sum(s.outcome == "draw" for s in summaries) / len(summaries)


def p_survive(summaries, team):
    """Mean over trials of the surviving fraction of ``team``."""
    summaries = _require(summaries)
    team = check_team(team)
    ratios = []
    for s in summaries:
        n0 = s.initial_counts[team]
        if n0 <= 0:
            raise ValueError(f"trial has no initial {team} aircraft")
        ratios.append(s.final_counts[team] / n0)
    return sum(ratios) / len(ratios)


@dataclass(frozen=True)
class TimingStats:
    """Per-decision wall-clock statistics in seconds."""

    count: int
    mean: float
    p50: float
    p95: float
    max: float

    def as_ms(self):
        return {
            "count": self.count,
            "mean_ms": self.mean * 1e3,
            "p50_ms": self.p50 * 1e3,
            "p95_ms": self.p95 * 1e3,
            "max_ms": self.max * 1e3,
        }


def timing_stats(samples):
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("no decision-time samples")
    p50, p95 = np.percentile(samples, [50, 95])
    return TimingStats(int(samples.size), float(samples.mean()), float(p50), float(p95), float(samples.max()))


def timing_summary(summaries, team=None):
    """Decision-time statistics grouped by team size label (e.g. ``"10v10"``).

    Pools every decision of every agent over all trials of a size.  Raises
    ValueError when there are no samples at all.
    """
    pooled = {}
    for s in summaries:
        pooled.setdefault(s.label, []).append(s._samples(team))
    out = {}
    for label, parts in pooled.items():
        samples = np.concatenate(parts)
        if samples.size:
            out[label] = timing_stats(samples)
    if not out:
        raise ValueError("no decision-time samples")
    return out
