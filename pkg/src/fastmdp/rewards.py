"""Reward peaks and risk wells built around teammates and opponents.

Every ownship sees two kinds of reward sources:

* positive peaks, attracting it toward an aircraft with unbounded reach;
* negative wells (risk wells) sitting on the straight-line extrapolation of
  an aircraft's track, active only inside a finite radius.

Below a penalty altitude above the terrain a linear penalty is added so the
hard deck outweighs every attractive reward.
"""

import math
from dataclasses import dataclass

import numpy as np

UNBOUNDED = math.inf

TEAMMATE_WELL = dict(magnitude=-100.0, decay=0.97, times=(0, 1, 2, 3, 4, 5), base_radius=150.0, radius_rate=10.0)
TEAMMATE_PEAK = dict(magnitude=10.0, decay=0.999)
OPPONENT_WELL = dict(magnitude=-300.0, decay=0.99, times=(0, 1, 5, 10))
OPPONENT_PEAK = dict(magnitude=200.0, decay=0.999)
# radius of the t=0 opponent well; a literal |v|*t radius would be zero there
OPPONENT_RADIUS_FLOOR = 150.0

DECK_CLEARANCE = 500.0
PENALTY_BAND = 1000.0
DECK_WEIGHT = 10.0


@dataclass(frozen=True)
class RewardPeak:
    magnitude: float
    decay: float
    location: tuple
    radius: float = UNBOUNDED

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")
        if not self.radius >= 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        if self.magnitude > 0 and self.radius != UNBOUNDED:
            raise ValueError("positive peaks have unbounded radius")
        object.__setattr__(self, "location", tuple(float(c) for c in self.location))

    @property
    def is_positive(self):
        return self.magnitude > 0


@dataclass(frozen=True)
class AircraftSnapshot:
    """Position and velocity of one aircraft as seen by the others."""

    position: tuple
    velocity: tuple
    team: str
    id: int

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(c) for c in self.position))
        object.__setattr__(self, "velocity", tuple(float(c) for c in self.velocity))

    @property
    def speed(self):
        return math.sqrt(sum(c * c for c in self.velocity))


@dataclass(frozen=True)
class TerrainConfig:
    h_max: float = 0.0
    deck_weight: float = DECK_WEIGHT

    @property
    def h_deck(self):
        return self.h_max + DECK_CLEARANCE

    @property
    def h_penalty(self):
        return self.h_deck + PENALTY_BAND


def _along_track(snap, t):
    return tuple(p + v * t for p, v in zip(snap.position, snap.velocity))


def build_teammate_peaks(mates):
    """Collision wells along each teammate's track plus a weak clustering peak.

    Returns seven peaks per teammate: six wells, then the positive peak.
    """
    peaks = []
    w = TEAMMATE_WELL
    for snap in mates:
        for t in w["times"]:
            peaks.append(
                RewardPeak(w["magnitude"], w["decay"], _along_track(snap, t), w["base_radius"] + w["radius_rate"] * t)
            )
        peaks.append(RewardPeak(TEAMMATE_PEAK["magnitude"], TEAMMATE_PEAK["decay"], snap.position))
    return peaks


def build_opponent_peaks(opponents, radius_floor=OPPONENT_RADIUS_FLOOR):
    """Collision wells along each opponent's track plus the pursuit peak.

    Well radius is speed times look-ahead time; the t=0 well uses
    ``radius_floor`` instead. Five peaks per opponent, pursuit peak last.
    """
    peaks = []
    w = OPPONENT_WELL
    for snap in opponents:
        speed = snap.speed
        for t in w["times"]:
            radius = speed * t if t > 0 else max(0.0, radius_floor)
            peaks.append(RewardPeak(w["magnitude"], w["decay"], _along_track(snap, t), radius))
        peaks.append(RewardPeak(OPPONENT_PEAK["magnitude"], OPPONENT_PEAK["decay"], snap.position))
    return peaks


def altitude_penalty(altitude, terrain):
    """Non-negative penalty, zero at or above the penalty altitude.

    Grows linearly with depth below ``terrain.h_penalty`` at ``deck_weight``
    per meter, so it reaches 10000 at the hard deck with the default weight.
    Accepts scalars or arrays.
    """
    depth = terrain.h_penalty - np.asarray(altitude, dtype=float)
    out = terrain.deck_weight * np.maximum(depth, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PeakArrays:
    """Column view of a peak list in Standard Positive Form.

    ``magnitude`` holds absolute values; the sign is implied by which array
    set a peak lives in.
    """

    location: np.ndarray
    magnitude: np.ndarray
    log_decay: np.ndarray
    radius: np.ndarray

    def __len__(self):
        return len(self.magnitude)


def pack_peaks(peaks):
    """Pack RewardPeak objects into arrays for vectorized evaluation."""
    peaks = list(peaks)
    if not peaks:
        empty = np.empty(0)
        return PeakArrays(np.empty((0, 3)), empty, empty, empty)
    return PeakArrays(
        location=np.array([p.location for p in peaks], dtype=float),
        magnitude=np.abs(np.array([p.magnitude for p in peaks], dtype=float)),
        log_decay=np.log(np.array([p.decay for p in peaks], dtype=float)),
        radius=np.array([p.radius for p in peaks], dtype=float),
    )


def split_peaks(peaks):
    """Separate a peak list into (positive, negative) lists, order kept."""
    pos = [p for p in peaks if p.magnitude > 0]
    neg = [p for p in peaks if p.magnitude < 0]
    return pos, neg


def _well_arrays(pos, vel, times, magnitude, decay, radius):
    # rows ordered aircraft-major, look-ahead time minor, as in the list builders
    t = np.asarray(times, dtype=float)
    loc = (pos[:, None, :] + vel[:, None, :] * t[None, :, None]).reshape(-1, 3)
    n = len(loc)
    return loc, np.full(n, abs(magnitude)), np.full(n, math.log(decay)), radius.reshape(-1)


def field_arrays(mate_pos, mate_vel, opp_pos, opp_vel, radius_floor=OPPONENT_RADIUS_FLOOR):
    """Vectorized equivalent of the list builders for one ownship.

    Takes ``(J, 3)`` teammate and ``(K, 3)`` opponent position/velocity
    arrays and returns ``(positive, negative)`` :class:`PeakArrays` holding
    the same peaks as ``build_teammate_peaks`` + ``build_opponent_peaks``.
    """
    mate_pos = np.asarray(mate_pos, dtype=float).reshape(-1, 3)
    mate_vel = np.asarray(mate_vel, dtype=float).reshape(-1, 3)
    opp_pos = np.asarray(opp_pos, dtype=float).reshape(-1, 3)
    opp_vel = np.asarray(opp_vel, dtype=float).reshape(-1, 3)

    tw, ow = TEAMMATE_WELL, OPPONENT_WELL
    t_mate = np.asarray(tw["times"], dtype=float)
    mate_radius = np.broadcast_to(tw["base_radius"] + tw["radius_rate"] * t_mate, (len(mate_pos), len(t_mate)))
    t_opp = np.asarray(ow["times"], dtype=float)
    speed = np.sqrt(np.sum(opp_vel * opp_vel, axis=1))
    opp_radius = speed[:, None] * t_opp[None, :]
    opp_radius[:, t_opp == 0] = max(0.0, radius_floor)

    parts = [
        _well_arrays(mate_pos, mate_vel, tw["times"], tw["magnitude"], tw["decay"], mate_radius),
        _well_arrays(opp_pos, opp_vel, ow["times"], ow["magnitude"], ow["decay"], opp_radius),
    ]
    neg = PeakArrays(*(np.concatenate([p[i] for p in parts]) for i in range(4)))
    pos = PeakArrays(
        location=np.concatenate([mate_pos, opp_pos]),
        magnitude=np.concatenate(
            [np.full(len(mate_pos), TEAMMATE_PEAK["magnitude"]), np.full(len(opp_pos), OPPONENT_PEAK["magnitude"])]
        ),
        log_decay=np.concatenate(
            [
                np.full(len(mate_pos), math.log(TEAMMATE_PEAK["decay"])),
                np.full(len(opp_pos), math.log(OPPONENT_PEAK["decay"])),
            ]
        ),
        radius=np.full(len(mate_pos) + len(opp_pos), UNBOUNDED),
    )
    return pos, neg
