"""Small argument checks shared by the public API."""

import math

import numpy as np

TEAMS = ("blue", "red")


def check_team(team):
    if team not in TEAMS:
        raise ValueError(f"team must be one of {TEAMS}, got {team!r}")
    return team


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_steps(horizon, dt):
    """Return the number of ``dt`` steps spanning ``horizon``.

    Raises ValueError unless the horizon is a positive integer multiple of dt.
    """
    horizon = check_positive(horizon, "horizon")
    dt = check_positive(dt, "dt")
    n = round(horizon / dt)
    if n < 1 or abs(n * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise ValueError(f"horizon {horizon} is not a positive multiple of dt {dt}")
    return n


def check_points(points):
    """Coerce to a float ndarray of shape (n, 3)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected points with shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points contain NaN or Inf")
    return arr
