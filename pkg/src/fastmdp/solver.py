"""Closed-form value surface and argmax action selection.

The value of a 3D point is the strongest positive peak minus the strongest
active risk well (evaluated on absolute magnitudes, then subtracted) minus
the altitude penalty.  An ownship picks the action whose 1 s projected
state has the highest value and executes its first 0.1 s.
"""

import time
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import _kernels, dynamics
from ._validation import check_points, check_positive, check_team
from .dynamics import AircraftState, DegenerateStateError
from .rewards import (
    OPPONENT_RADIUS_FLOOR,
    AircraftSnapshot,
    PeakArrays,
    TerrainConfig,
    altitude_penalty,
    build_opponent_peaks,
    build_teammate_peaks,
    field_arrays,
    pack_peaks,
    split_peaks,
)


@dataclass(frozen=True)
class ValueBreakdown:
    pos_max: float
    neg_max: float
    deck: float
    total: float


@dataclass(frozen=True)
class DecisionRecord:
    action_index: int
    chosen_value: float
    one_step_state: AircraftState
    decision_time: float  # seconds


def _as_arrays(peaks):
    return peaks if isinstance(peaks, PeakArrays) else pack_peaks(peaks)


def _surface_max(points, peaks, gated):
    """Max over peaks of |r| * decay**d (optionally gated by d < radius)."""
    if len(peaks) == 0:
        return np.zeros(len(points))
    diff = points[:, None, :] - peaks.location[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    vals = peaks.magnitude * np.exp(d * peaks.log_decay)
    if gated:
        vals = np.where(d < peaks.radius, vals, 0.0)
    return vals.max(axis=1)


def evaluate(points, pos_peaks, neg_peaks, terrain):
    """Value of ``(n, 3)`` NED points.

    Returns ``(pos_max, neg_max, deck, total)`` arrays of length n.
    """
    pts = np.ascontiguousarray(points, dtype=float).reshape(-1, 3)
    pos, neg = _as_arrays(pos_peaks), _as_arrays(neg_peaks)
    return _kernels.surface(
        pts,
        pos.location,
        pos.magnitude,
        pos.log_decay,
        neg.location,
        neg.magnitude,
        neg.log_decay,
        neg.radius,
        float(terrain.h_penalty),
        float(terrain.deck_weight),
    )


def evaluate_reference(points, pos_peaks, neg_peaks, terrain):
    """Broadcasting numpy twin of :func:`evaluate`."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    pos_max = _surface_max(pts, _as_arrays(pos_peaks), gated=False)
    neg_max = _surface_max(pts, _as_arrays(neg_peaks), gated=True)
    deck = terrain.deck_weight * np.maximum(terrain.h_penalty + pts[:, 2], 0.0)
    return pos_max, neg_max, deck, pos_max - neg_max - deck


def value_at(point, pos_peaks, neg_peaks, terrain):
    """Value breakdown at one NED point ``(x, y, z)``; altitude is ``-z``.

    Negative wells may be given with either sign; only magnitudes are used.
    """
    pts = check_points(point)
    if len(pts) != 1:
        raise ValueError("value_at takes a single point")
    pos_max, neg_max, _, _ = evaluate(pts, pos_peaks, neg_peaks, terrain)
    deck = altitude_penalty(-pts[0, 2], terrain)
    p, n = float(pos_max[0]), float(neg_max[0])
    return ValueBreakdown(pos_max=p, neg_max=n, deck=deck, total=p - n - deck)


def select_action(
    ownship,
    team_actions,
    limits,
    pos_peaks,
    neg_peaks,
    terrain,
    horizon=dynamics.HORIZON,
    dt=dynamics.DT,
):
    """Pick the action whose projected state is most valuable.

    ``team_actions`` is a list of ControlAction or an ``(n, 3)`` array.  Ties
    go to the lowest index.  Candidates whose projection degenerates are
    skipped; DegenerateStateError is raised if none remain.
    """
    t0 = time.perf_counter()
    acts = team_actions if isinstance(team_actions, np.ndarray) else dynamics.action_array(team_actions)
    if len(acts) == 0:
        raise ValueError("team_actions must be non-empty")
    dynamics._check_state(ownship)
    one, term, valid = dynamics.project_batch(ownship, acts, limits, horizon, dt)
    if not valid.any():
        raise DegenerateStateError("every projected state is degenerate")
    total = evaluate(term[:, :3], pos_peaks, neg_peaks, terrain)[3]
    total = np.where(valid, total, -np.inf)
    best = int(np.argmax(total))
    return DecisionRecord(
        action_index=best,
        chosen_value=float(total[best]),
        one_step_state=AircraftState.from_array(one[best]),
        decision_time=time.perf_counter() - t0,
    )


def decide(ownship, mates, opponents, team_actions, limits, terrain, radius_floor=OPPONENT_RADIUS_FLOOR, **kwargs):
    """Build the reward field for one ownship and select its action.

    ``mates`` and ``opponents`` are ``(positions, velocities)`` array pairs.
    The returned ``decision_time`` covers peak building, projection, valuation
    and the argmax.
    """
    t0 = time.perf_counter()
    pos, neg = field_arrays(*mates, *opponents, radius_floor=radius_floor)
    rec = select_action(ownship, team_actions, limits, pos, neg, terrain, **kwargs)
    return DecisionRecord(rec.action_index, rec.chosen_value, rec.one_step_state, time.perf_counter() - t0)


_warm = False


def warmup():
    """Load/compile the numba kernels once so no timed decision pays for it."""
    global _warm
    if _warm:
        return
    state = AircraftState(0.0, 0.0, -5000.0, 100.0)
    pos, neg = field_arrays(np.zeros((1, 3)), np.zeros((1, 3)), np.ones((1, 3)), np.ones((1, 3)))
    select_action(state, dynamics.table_array(dynamics.RED_ACTIONS), dynamics.RED_LIMITS, pos, neg, TerrainConfig())
    _warm = True


class FastMDPPolicy(BaseEstimator):
    """Per-ownship FastMDP policy with an estimator-style interface.

    ``fit`` takes the snapshots of every *other* aircraft and builds the
    reward field; ``predict`` returns the chosen action index for each
    ownship state; ``score_samples`` evaluates the value surface.

    Parameters
    ----------
    team : {"blue", "red"}
    horizon, dt : float
        Projection horizon and integration step in seconds.
    h_max : float
        Terrain height; the hard deck sits 500 m above it.
    deck_weight : float
        Penalty per meter below the penalty altitude.
    radius_floor : float
        Radius of the present-position opponent well.
    limits : PerformanceLimits, optional
        Defaults to the team's standard envelope.
    actions : ActionTable, optional
        Defaults to the team's standard action grid.
    """

    def __init__(
        self,
        team="blue",
        horizon=dynamics.HORIZON,
        dt=dynamics.DT,
        h_max=0.0,
        deck_weight=10.0,
        radius_floor=OPPONENT_RADIUS_FLOOR,
        limits=None,
        actions=None,
    ):
        self.team = team
        self.horizon = horizon
        self.dt = dt
        self.h_max = h_max
        self.deck_weight = deck_weight
        self.radius_floor = radius_floor
        self.limits = limits
        self.actions = actions

    def fit(self, X, y=None):
        """Build peaks from ``X``, a sequence of AircraftSnapshot (others only)."""
        team = check_team(self.team)
        check_positive(self.horizon, "horizon")
        check_positive(self.dt, "dt")
        others = list(X)
        for snap in others:
            if not isinstance(snap, AircraftSnapshot):
                raise TypeError(f"expected AircraftSnapshot, got {type(snap).__name__}")
        mates = [s for s in others if s.team == team]
        opponents = [s for s in others if s.team != team]
        self.peaks_ = build_teammate_peaks(mates) + build_opponent_peaks(opponents, self.radius_floor)
        pos, neg = split_peaks(self.peaks_)
        self.pos_peaks_ = pack_peaks(pos)
        self.neg_peaks_ = pack_peaks(neg)
        self.terrain_ = TerrainConfig(h_max=self.h_max, deck_weight=self.deck_weight)
        self.limits_ = self.limits if self.limits is not None else dynamics.DEFAULT_LIMITS[team]
        self.action_list_ = dynamics.enumerate_actions(team, self.actions)
        self.action_array_ = dynamics.action_array(self.action_list_)
        return self

    def decide(self, state):
        """Full decision record for one ownship state."""
        check_is_fitted(self, "pos_peaks_")
        return select_action(
            state,
            self.action_array_,
            self.limits_,
            self.pos_peaks_,
            self.neg_peaks_,
            self.terrain_,
            horizon=self.horizon,
            dt=self.dt,
        )

    def predict(self, X):
        """Action index for each ownship in ``X`` (states or ``(n, 8)`` rows)."""
        check_is_fitted(self, "pos_peaks_")
        states = [s if isinstance(s, AircraftState) else AircraftState.from_array(s) for s in X]
        return np.array([self.decide(s).action_index for s in states], dtype=int)

    def score_samples(self, X):
        """Value of each NED point in ``X`` (shape ``(n, 3)``)."""
        check_is_fitted(self, "pos_peaks_")
        return evaluate(check_points(X), self.pos_peaks_, self.neg_peaks_, self.terrain_)[3]
