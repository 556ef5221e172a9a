"""Two-team engagement: spawning, the simultaneous 10 Hz loop, capture and
crash rules, scoring and episode termination."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import dynamics
from ._validation import check_count, check_positive, check_steps
from .dynamics import AircraftState
from .rewards import DECK_WEIGHT, OPPONENT_RADIUS_FLOOR, AircraftSnapshot, TerrainConfig
from .solver import decide, warmup

BLUE, RED = "blue", "red"


class ConfigError(ValueError):
    """Invalid scenario configuration."""


class EpisodeOverError(RuntimeError):
    """Raised when stepping a world that has already terminated."""


@dataclass(frozen=True)
class ScenarioConfig:
    blue_count: int = 1
    red_count: int = 1
    volume: float = 25000.0
    h_max: float = 0.0
    dt: float = dynamics.DT
    horizon: float = dynamics.HORIZON
    max_steps: int = 9000
    seed: int = 0
    blue_limits: dynamics.PerformanceLimits = dynamics.BLUE_LIMITS
    red_limits: dynamics.PerformanceLimits = dynamics.RED_LIMITS
    blue_actions: dynamics.ActionTable = dynamics.BLUE_ACTIONS
    red_actions: dynamics.ActionTable = dynamics.RED_ACTIONS
    # spawn geometry, meters / degrees; teams start 3-7 km apart so the
    # pursuit peaks outweigh the teammate clustering peaks
    blue_x_band: tuple = (9000.0, 11000.0)
    red_x_band: tuple = (14000.0, 16000.0)
    y_band: tuple = (10000.0, 15000.0)
    altitude_band: tuple = (3000.0, 8000.0)
    heading_spread_deg: float = 20.0
    # capture rule
    capture_radius: float = 100.0
    capture_angle_deg: float = 60.0
    capture_steps: int = 30
    history_len: int = 30
    # reward field
    radius_floor: float = OPPONENT_RADIUS_FLOOR
    deck_weight: float = DECK_WEIGHT

    @property
    def terrain(self):
        return TerrainConfig(h_max=self.h_max, deck_weight=self.deck_weight)

    def limits(self, team):
        return self.blue_limits if team == BLUE else self.red_limits

    def actions(self, team):
        return self.blue_actions if team == BLUE else self.red_actions

    def validate(self):
        try:
            check_count(self.blue_count, "blue_count")
            check_count(self.red_count, "red_count")
            check_count(self.max_steps, "max_steps")
            check_count(self.capture_steps, "capture_steps")
            check_count(self.history_len, "history_len")
            check_positive(self.volume, "volume")
            check_positive(self.capture_radius, "capture_radius")
            check_steps(self.horizon, self.dt)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for name in ("blue_x_band", "red_x_band", "y_band", "altitude_band"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi <= self.volume:
                raise ConfigError(f"{name} {lo, hi} must lie inside [0, {self.volume}]")
        if self.altitude_band[0] <= self.terrain.h_deck:
            raise ConfigError("spawn altitudes must be above the hard deck")
        if not 0 < self.capture_angle_deg <= 180:
            raise ConfigError("capture_angle_deg must lie in (0, 180]")
        return self


@dataclass(frozen=True)
class Aircraft:
    id: int
    team: str
    state: AircraftState

    def snapshot(self):
        return AircraftSnapshot(tuple(self.state.position), tuple(self.state.velocity), self.team, self.id)


@dataclass(frozen=True)
class EngagementEvent:
    kind: str  # spawn | capture | crash | draw_timeout
    step: int
    subject_id: int = None
    pursuer_id: int = None
    team_scores: tuple = ()  # ((team, score), ...) after the event


@dataclass(frozen=True)
class WorldState:
    """Immutable world snapshot.

    ``history`` maps aircraft id to a tuple of up to ``history_len`` past
    ``(position, velocity)`` entries, oldest first; the newest entry is the
    state one step before the current one.  ``capture_progress`` only stores
    non-zero counters, keyed by ``(pursuer_id, evader_id)``.
    """

    aircraft: tuple
    history: dict
    capture_progress: dict
    scores: dict
    step: int
    rng_seed: int
    initial_counts: dict
    captured: tuple = ()
    crashed: tuple = ()

    @classmethod
    def from_aircraft(cls, aircraft, rng_seed=0, history=None, capture_progress=None, scores=None, step=0):
        """World built from explicit Aircraft (for scripted scenarios)."""
        aircraft = tuple(sorted(aircraft, key=lambda a: a.id))
        counts = {t: sum(1 for a in aircraft if a.team == t) for t in (BLUE, RED)}
        hist = {a.id: () for a in aircraft}
        hist.update(history or {})
        return cls(
            aircraft=aircraft,
            history=hist,
            capture_progress=dict(capture_progress or {}),
            scores=dict(scores or {BLUE: 0, RED: 0}),
            step=step,
            rng_seed=rng_seed,
            initial_counts=counts,
        )

    def team(self, team):
        return [a for a in self.aircraft if a.team == team]

    def counts(self):
        return {t: sum(1 for a in self.aircraft if a.team == t) for t in (BLUE, RED)}

    def is_over(self, max_steps):
        c = self.counts()
        return c[BLUE] == 0 or c[RED] == 0 or self.step >= max_steps


@dataclass
class EpisodeResult:
    config: ScenarioConfig
    scores: dict
    outcome: str
    events: list
    telemetry: list  # TelemetryRow per aircraft per step
    steps: int
    initial_counts: dict
    final_counts: dict

    def decision_times(self, team=None):
        """Decision wall-clock samples in seconds, optionally for one team."""
        return np.array([r.decision_time for r in self.telemetry if team is None or r.team == team])


@dataclass(frozen=True)
class TelemetryRow:
    step: int
    time_s: float
    aircraft_id: int
    team: str
    state: AircraftState
    action_index: int
    chosen_value: float
    decision_time: float


def _scores_tuple(scores):
    return tuple(sorted(scores.items()))


def spawn_world(config):
    """Place both teams on opposing sides of the volume.

    All draws come from ``numpy.random.default_rng(config.seed)`` in a fixed
    order: blue aircraft by ascending id, then red; per aircraft x, y,
    altitude, heading offset.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    spread = math.radians(config.heading_spread_deg)
    aircraft = []
    events = []
    teams = [BLUE] * config.blue_count + [RED] * config.red_count
    for ident, team in enumerate(teams):
        band = config.blue_x_band if team == BLUE else config.red_x_band
        x = rng.uniform(*band)
        y = rng.uniform(*config.y_band)
        alt = rng.uniform(*config.altitude_band)
        offset = rng.uniform(-spread, spread)
        heading = offset if team == BLUE else dynamics.wrap_angle(math.pi + offset)
        lim = config.limits(team)
        state = AircraftState(x=x, y=y, z=-alt, V=0.5 * (lim.V_min + lim.V_max), psi=float(heading))
        aircraft.append(Aircraft(ident, team, state))
    scores = {BLUE: 0, RED: 0}
    for a in aircraft:
        events.append(EngagementEvent("spawn", 0, a.id, None, _scores_tuple(scores)))
    world = WorldState(
        aircraft=tuple(aircraft),
        history={a.id: () for a in aircraft},
        capture_progress={},
        scores=scores,
        step=0,
        rng_seed=config.seed,
        initial_counts={BLUE: config.blue_count, RED: config.red_count},
    )
    return world, events


def check_capture(pursuer, evader, evader_history, radius=100.0, angle_deg=60.0, min_history=30):
    """Instantaneous capture condition.

    ``evader_history`` holds past ``(position, velocity)`` entries, oldest
    first; the control point is the entry ``min_history`` steps back.  True
    iff the history is deep enough, the pursuer is strictly within
    ``radius`` of the control point and the angle between the two current
    velocity vectors is strictly below ``angle_deg``.
    """
    if len(evader_history) < min_history:
        return False
    control = np.asarray(evader_history[-min_history][0], dtype=float)
    if np.linalg.norm(np.asarray(pursuer.position) - control) >= radius:
        return False
    vp = np.asarray(pursuer.velocity, dtype=float)
    ve = np.asarray(evader.velocity, dtype=float)
    norm = np.linalg.norm(vp) * np.linalg.norm(ve)
    if norm == 0:
        return False
    cos_angle = np.clip(np.dot(vp, ve) / norm, -1.0, 1.0)
    return bool(math.degrees(math.acos(cos_angle)) < angle_deg)


def _field_inputs(positions, velocities, teams, index):
    own_team = teams[index]
    mates = (teams == own_team)
    mates[index] = False
    opps = teams != own_team
    return (positions[mates], velocities[mates]), (positions[opps], velocities[opps])


def step(world, config, order=None):
    """Advance the world by one decision interval.

    Every live aircraft decides against the same frozen snapshot, then all
    one-step states are applied together.  ``order`` optionally permutes the
    decision loop (the result must not depend on it).

    Returns ``(next_world, events, decisions)`` where ``decisions`` maps
    aircraft id to its DecisionRecord.
    """
    if world.is_over(config.max_steps):
        raise EpisodeOverError(f"episode already terminated at step {world.step}")

    live = world.aircraft
    positions = np.array([a.state.position for a in live])
    velocities = np.array([a.state.velocity for a in live])
    teams = np.array([a.team for a in live])
    terrain = config.terrain
    action_arrays = {t: dynamics.table_array(config.actions(t)) for t in (BLUE, RED)}

    indices = range(len(live)) if order is None else order
    decisions = {}
    for i in indices:
        a = live[i]
        mates, opps = _field_inputs(positions, velocities, teams, i)
        decisions[a.id] = decide(
            a.state,
            mates,
            opps,
            action_arrays[a.team],
            config.limits(a.team),
            terrain,
            radius_floor=config.radius_floor,
            horizon=config.horizon,
            dt=config.dt,
        )
    if len(decisions) != len(live):
        raise ValueError("order must be a permutation of the live aircraft")

    new_step = world.step + 1
    moved = tuple(replace(a, state=decisions[a.id].one_step_state) for a in live)
    history = {}
    for a in live:
        past = world.history[a.id] + ((tuple(a.state.position), tuple(a.state.velocity)),)
        history[a.id] = past[-config.history_len :]

    snaps = {a.id: a.snapshot() for a in moved}
    team_of = {a.id: a.team for a in moved}
    progress = {}
    for p in moved:
        for e in moved:
            if p.team == e.team:
                continue
            if check_capture(
                snaps[p.id],
                snaps[e.id],
                history[e.id],
                radius=config.capture_radius,
                angle_deg=config.capture_angle_deg,
                min_history=config.history_len,
            ):
                progress[(p.id, e.id)] = min(world.capture_progress.get((p.id, e.id), 0) + 1, config.capture_steps)

    scores = dict(world.scores)
    events = []
    removed = set()
    captured = list(world.captured)
    for (pid, eid), count in sorted(progress.items()):
        if count < config.capture_steps or pid in removed or eid in removed:
            continue
        removed.add(eid)
        captured.append(eid)
        scores[team_of[pid]] += 1
        events.append(EngagementEvent("capture", new_step, eid, pid, _scores_tuple(scores)))

    crashed = list(world.crashed)
    h_deck = terrain.h_deck
    for a in moved:
        if a.id not in removed and a.state.altitude < h_deck:
            removed.add(a.id)
            crashed.append(a.id)
            events.append(EngagementEvent("crash", new_step, a.id, None, _scores_tuple(scores)))

    survivors = tuple(a for a in moved if a.id not in removed)
    next_world = WorldState(
        aircraft=survivors,
        history={a.id: history[a.id] for a in survivors},
        capture_progress={k: v for k, v in progress.items() if k[0] not in removed and k[1] not in removed},
        scores=scores,
        step=new_step,
        rng_seed=world.rng_seed,
        initial_counts=world.initial_counts,
        captured=tuple(captured),
        crashed=tuple(crashed),
    )
    if next_world.step >= config.max_steps and not (
        next_world.counts()[BLUE] == 0 or next_world.counts()[RED] == 0
    ):
        events.append(EngagementEvent("draw_timeout", new_step, None, None, _scores_tuple(scores)))
    return next_world, events, decisions


def outcome_of(scores):
    if scores[BLUE] > scores[RED]:
        return "blue_win"
    if scores[RED] > scores[BLUE]:
        return "red_win"
    return "draw"


def run_episode(config, progress=None):
    """Run one contest to termination and collect events and telemetry.

    ``progress``, if given, is called with the world after every step.
    """
    config.validate()
    warmup()
    world, events = spawn_world(config)
    telemetry = []
    dt = config.dt
    while not world.is_over(config.max_steps):
        prev = world
        world, step_events, decisions = step(world, config)
        for a in prev.aircraft:
            rec = decisions[a.id]
            telemetry.append(
                TelemetryRow(
                    step=prev.step,
                    time_s=prev.step * dt,
                    aircraft_id=a.id,
                    team=a.team,
                    state=a.state,
                    action_index=rec.action_index,
                    chosen_value=rec.chosen_value,
                    decision_time=rec.decision_time,
                )
            )
        events.extend(step_events)
        if progress is not None:
            progress(world)
    return EpisodeResult(
        config=config,
        scores=dict(world.scores),
        outcome=outcome_of(world.scores),
        events=events,
        telemetry=telemetry,
        steps=world.step,
        initial_counts=dict(world.initial_counts),
        final_counts=world.counts(),
    )
