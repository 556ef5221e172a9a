"""Pseudo-6DOF fixed-wing model, Euler integration and forward projection.

Positions use NED axes (altitude ``h = -z``) with climb-positive flight path
angle, so ``dh/dt = V sin(gamma)``.  The three controls are angle-of-attack
rate, roll rate and thrust in g's.

All batch routines work on an ``(n, 8)`` state array with columns given by
:data:`STATE_FIELDS`; the scalar API wraps the same kernel so both paths
produce the same numbers.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._validation import check_steps, check_team

G = 9.8
LIFT = 0.5
MACH = 343.0
DT = 0.1
HORIZON = 1.0
# after reflection |gamma| is kept this far from vertical so cos(gamma) never vanishes
GAMMA_MARGIN = 1e-5
DEGENERATE_GAMMA = math.pi / 2 - 1e-6

STATE_FIELDS = ("x", "y", "z", "V", "gamma", "psi", "phi", "alpha")
X, Y, Z, V, GAMMA, PSI, PHI, ALPHA = range(8)


class DegenerateStateError(ValueError):
    """Raised for states where the equations of motion are singular."""


@dataclass(frozen=True)
class PerformanceLimits:
    V_min: float
    V_max: float
    psi_dot_max: float
    alpha_min: float
    alpha_max: float

    def __post_init__(self):
        if not self.V_min < self.V_max:
            raise ValueError("V_min must be below V_max")
        if self.V_min <= 0:
            raise ValueError("V_min must be positive")
        if not self.alpha_min < self.alpha_max:
            raise ValueError("alpha_min must be below alpha_max")
        if self.psi_dot_max <= 0:
            raise ValueError("psi_dot_max must be positive")


BLUE_LIMITS = PerformanceLimits(
    V_min=0.1 * MACH, V_max=0.35 * MACH, psi_dot_max=1.5, alpha_min=-0.009, alpha_max=0.69
)
RED_LIMITS = PerformanceLimits(
    V_min=0.1 * MACH, V_max=0.30 * MACH, psi_dot_max=1.3, alpha_min=-0.009, alpha_max=0.52
)
DEFAULT_LIMITS = {"blue": BLUE_LIMITS, "red": RED_LIMITS}


@dataclass(frozen=True)
class ActionTable:
    """Discrete values for each control channel of one team."""

    phi_dot: tuple
    alpha_dot: tuple
    n_x: tuple

    def __post_init__(self):
        for name in ("phi_dot", "alpha_dot", "n_x"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ValueError(f"action table channel {name} is empty")
            object.__setattr__(self, name, values)

    def __len__(self):
        return len(self.phi_dot) * len(self.alpha_dot) * len(self.n_x)


def _grid(lo, hi, n):
    return tuple(round(float(v), 10) for v in np.linspace(lo, hi, n))


RED_ACTIONS = ActionTable(phi_dot=_grid(-1.0, 1.0, 11), alpha_dot=_grid(-0.5, 0.5, 11), n_x=_grid(0, 6, 7))
BLUE_ACTIONS = ActionTable(phi_dot=_grid(-1.5, 1.5, 11), alpha_dot=_grid(-0.5, 0.5, 11), n_x=_grid(0, 8, 9))
DEFAULT_ACTIONS = {"blue": BLUE_ACTIONS, "red": RED_ACTIONS}


@dataclass(frozen=True)
class ControlAction:
    alpha_dot: float
    phi_dot: float
    n_x: float


@dataclass(frozen=True)
class AircraftState:
    x: float
    y: float
    z: float
    V: float
    gamma: float = 0.0
    psi: float = 0.0
    phi: float = 0.0
    alpha: float = 0.0
    theta: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "theta", self.gamma + self.alpha)

    @property
    def altitude(self):
        return -self.z

    @property
    def position(self):
        return np.array([self.x, self.y, self.z])

    @property
    def velocity(self):
        cg = math.cos(self.gamma)
        return np.array(
            [self.V * cg * math.cos(self.psi), self.V * cg * math.sin(self.psi), -self.V * math.sin(self.gamma)]
        )

    def to_array(self):
        return np.array([getattr(self, f) for f in STATE_FIELDS], dtype=float)

    @classmethod
    def from_array(cls, row):
        return cls(*(float(v) for v in row))


@dataclass(frozen=True)
class StateDerivative:
    V_dot: float
    gamma_dot: float
    psi_dot: float
    x_dot: float
    y_dot: float
    z_dot: float
    phi_dot: float
    alpha_dot: float


def wrap_angle(a):
    """Wrap angles into (-pi, pi]; values already inside are returned as is."""
    a = np.asarray(a, dtype=float)
    inside = (a > -math.pi) & (a <= math.pi)
    out = np.where(inside, a, math.pi - np.mod(math.pi - a, 2 * math.pi))
    return float(out) if out.ndim == 0 else out


def _rates(x, alpha_dot, phi_dot, n_x, psi_dot_max):
    """Time derivatives for state rows ``x`` (columns unpacked, any shape)."""
    v, gam, phi, alp = x[V], x[GAMMA], x[PHI], x[ALPHA]
    cg = np.cos(gam)
    sg = np.sin(gam)
    n_f = n_x * np.sin(alp) + LIFT
    v_dot = G * (n_x * np.cos(alp) - sg)
    gamma_dot = (G / v) * (n_f * np.cos(phi) - cg)
    psi_dot = np.clip(G * n_f * np.sin(phi) / (v * cg), -psi_dot_max, psi_dot_max)
    vh = v * cg
    return v_dot, gamma_dot, psi_dot, vh * np.cos(x[PSI]), vh * np.sin(x[PSI]), -v * sg


def _euler(x, alpha_dot, phi_dot, n_x, limits, dt):
    """One Euler step on column-major state ``x`` (8, n); returns a new array."""
    v_dot, gamma_dot, psi_dot, x_dot, y_dot, z_dot = _rates(x, alpha_dot, phi_dot, n_x, limits.psi_dot_max)
    out = np.empty_like(x)
    out[X] = x[X] + dt * x_dot
    out[Y] = x[Y] + dt * y_dot
    out[Z] = x[Z] + dt * z_dot
    out[V] = x[V] + dt * v_dot
    out[GAMMA] = x[GAMMA] + dt * gamma_dot
    out[PSI] = x[PSI] + dt * psi_dot
    out[PHI] = x[PHI] + dt * phi_dot
    out[ALPHA] = x[ALPHA] + dt * alpha_dot
    # clamp alpha, then V, then wrap angles
    np.clip(out[ALPHA], limits.alpha_min, limits.alpha_max, out=out[ALPHA])
    np.clip(out[V], limits.V_min, limits.V_max, out=out[V])
    _wrap_attitude(out)
    return out


def _wrap_attitude(x):
    """Carry gamma through vertical and wrap psi and phi into (-pi, pi].

    A flight path pitched past +-90 deg is the same attitude as
    gamma' = +-pi - gamma with heading and roll turned by pi.
    """
    gam = x[GAMMA]
    over = np.abs(gam) > math.pi / 2
    if np.any(over):
        gam[over] = np.copysign(math.pi, gam[over]) - gam[over]
        x[PSI][over] += math.pi
        x[PHI][over] += math.pi
    bound = math.pi / 2 - GAMMA_MARGIN
    np.clip(gam, -bound, bound, out=gam)
    x[PSI] = wrap_angle(x[PSI])
    x[PHI] = wrap_angle(x[PHI])


def _degenerate(x):
    return (x[V] <= 0) | (np.abs(x[GAMMA]) >= DEGENERATE_GAMMA) | ~np.isfinite(x).all(axis=0)


def _check_state(state):
    if not state.V > 0 or not abs(state.gamma) < DEGENERATE_GAMMA:
        raise DegenerateStateError(f"degenerate state: V={state.V}, gamma={state.gamma}")


def derivatives(state, action, limits=None):
    """Rates of change of every state field under ``action``.

    The turn rate is clamped to ``limits.psi_dot_max`` when limits are given.
    """
    _check_state(state)
    psi_dot_max = math.inf if limits is None else limits.psi_dot_max
    x = state.to_array()
    v_dot, gamma_dot, psi_dot, x_dot, y_dot, z_dot = _rates(
        x, action.alpha_dot, action.phi_dot, action.n_x, psi_dot_max
    )
    return StateDerivative(
        V_dot=float(v_dot),
        gamma_dot=float(gamma_dot),
        psi_dot=float(psi_dot),
        x_dot=float(x_dot),
        y_dot=float(y_dot),
        z_dot=float(z_dot),
        phi_dot=float(action.phi_dot),
        alpha_dot=float(action.alpha_dot),
    )


def integrate_step(state, action, limits, dt=DT):
    """Advance ``state`` by one forward-Euler step of length ``dt``."""
    return forward_project(state, action, limits, horizon=dt, dt=dt)


def forward_project(state, action, limits, horizon=HORIZON, dt=DT):
    """Hold ``action`` for ``horizon`` seconds and return the terminal state."""
    _check_state(state)
    acts = np.array([[action.alpha_dot, action.phi_dot, action.n_x]], dtype=float)
    _, term, valid = project_batch(state, acts, limits, horizon, dt)
    if not valid[0]:
        raise DegenerateStateError(f"projection became degenerate: {term[0]}")
    return AircraftState.from_array(term[0])


def enumerate_actions(team, table=None):
    """All actions of a team, roll rate slowest-varying and thrust fastest."""
    if table is None:
        table = DEFAULT_ACTIONS[check_team(team)]
    return [
        ControlAction(alpha_dot=a, phi_dot=p, n_x=n)
        for p in table.phi_dot
        for a in table.alpha_dot
        for n in table.n_x
    ]


@functools.lru_cache(maxsize=32)
def table_array(table):
    """Read-only ``(n, 3)`` action array for an ActionTable, in enumeration order."""
    arr = action_array(enumerate_actions(None, table))
    arr.setflags(write=False)
    return arr


def action_array(actions):
    """Stack actions into an ``(n, 3)`` array of (alpha_dot, phi_dot, n_x)."""
    return np.array([(a.alpha_dot, a.phi_dot, a.n_x) for a in actions], dtype=float).reshape(-1, 3)


def _distinct(column):
    key = column.tobytes()
    hit = _DISTINCT_CACHE.get(key)
    if hit is None:
        values, idx = np.unique(column, return_inverse=True)
        hit = (values, idx.astype(np.int64))
        if len(_DISTINCT_CACHE) > 64:
            _DISTINCT_CACHE.clear()
        _DISTINCT_CACHE[key] = hit
    return hit


_DISTINCT_CACHE = {}


def project_batch(state, actions, limits, horizon=HORIZON, dt=DT):
    """Project one state under many held actions at once.

    Parameters
    ----------
    state : AircraftState or array of shape (8,)
    actions : array of shape (n, 3)
        Rows of (alpha_dot, phi_dot, n_x), see :func:`action_array`.

    Returns
    -------
    one_step, terminal : ndarray of shape (n, 8)
        States after the first ``dt`` and after ``horizon``.
    valid : ndarray of bool, shape (n,)
        False where the projection hit a degenerate state; those rows are
        unusable.
    """
    n_steps = check_steps(horizon, dt)
    start = state.to_array() if isinstance(state, AircraftState) else np.asarray(state, dtype=float)
    acts = np.asarray(actions, dtype=float)
    if acts.ndim != 2 or acts.shape[1] != 3 or len(acts) == 0:
        raise ValueError(f"actions must have shape (n, 3) with n > 0, got {acts.shape}")
    start = np.array(start, dtype=float)
    start[[PSI, PHI]] = wrap_angle(start[[PSI, PHI]])
    alpha_rates, alpha_idx = _distinct(acts[:, 0])
    phi_rates, phi_idx = _distinct(acts[:, 1])
    return _kernels.project(
        np.ascontiguousarray(start),
        np.ascontiguousarray(acts),
        alpha_rates,
        alpha_idx,
        phi_rates,
        phi_idx,
        limits.V_min,
        limits.V_max,
        limits.psi_dot_max,
        limits.alpha_min,
        limits.alpha_max,
        float(dt),
        n_steps,
        GAMMA_MARGIN,
        DEGENERATE_GAMMA,
    )


def project_batch_reference(state, actions, limits, horizon=HORIZON, dt=DT):
    """Pure-numpy twin of :func:`project_batch`, kept as a cross-check."""
    n_steps = check_steps(horizon, dt)
    start = state.to_array() if isinstance(state, AircraftState) else np.asarray(state, dtype=float)
    acts = np.asarray(actions, dtype=float)
    if acts.ndim != 2 or acts.shape[1] != 3 or len(acts) == 0:
        raise ValueError(f"actions must have shape (n, 3) with n > 0, got {acts.shape}")
    alpha_dot, phi_dot, n_x = acts[:, 0], acts[:, 1], acts[:, 2]
    x = np.repeat(start.reshape(8, 1), len(acts), axis=1)
    valid = ~_degenerate(x)
    one_step = None
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(n_steps):
            x = _euler(x, alpha_dot, phi_dot, n_x, limits, dt)
            valid &= ~_degenerate(x)
            if i == 0:
                one_step = x
    return one_step.T.copy(), x.T.copy(), valid


def reachable_states(state, actions, limits, horizon=HORIZON, dt=DT):
    """Pairs of (one-step state, horizon state), one per action, in order."""
    if len(actions) == 0:
        raise ValueError("actions must be non-empty")
    _check_state(state)
    one, term, valid = project_batch(state, action_array(actions), limits, horizon, dt)
    if not valid.all():
        bad = int(np.flatnonzero(~valid)[0])
        raise DegenerateStateError(f"projection of action {bad} became degenerate")
    return [(AircraftState.from_array(a), AircraftState.from_array(b)) for a, b in zip(one, term)]


def limits_for(team):
    return DEFAULT_LIMITS[check_team(team)]
