"""Compiled inner loops for projection and value evaluation.

These mirror ``dynamics._euler`` and ``solver.evaluate_reference`` one for
one; the numpy versions stay as the reference the tests compare against.
"""

import math

import numpy as np
from numba import njit

G = 9.8
LIFT = 0.5
TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


@njit(cache=True, inline="always")
def _wrap(a):
    # inputs move by less than 2*pi per step, one correction is enough
    if a > math.pi:
        return a - TWO_PI
    if a <= -math.pi:
        return a + TWO_PI
    return a


@njit(cache=True)
def _channel(x0, rates, dt, n_steps, lo, hi, wrap):
    """Per-rate trajectories of a rate-driven angle: value, sin, cos at each
    step start, plus the value after every step."""
    m = rates.shape[0]
    sin_t = np.empty((m, n_steps))
    cos_t = np.empty((m, n_steps))
    after = np.empty((m, n_steps))
    for u in range(m):
        a = x0
        for i in range(n_steps):
            sin_t[u, i] = math.sin(a)
            cos_t[u, i] = math.cos(a)
            a = a + dt * rates[u]
            if wrap:
                a = _wrap(a)
            else:
                a = min(max(a, lo), hi)
            after[u, i] = a
    return sin_t, cos_t, after


@njit(cache=True)
def project(
    start,
    acts,
    alpha_rates,
    alpha_idx,
    phi_rates,
    phi_idx,
    v_min,
    v_max,
    psi_dot_max,
    alpha_min,
    alpha_max,
    dt,
    n_steps,
    gamma_margin,
    degenerate_gamma,
):
    """Euler-project ``start`` under every action row (alpha_dot, phi_dot, n_x).

    ``alpha_idx``/``phi_idx`` map each row to its entry in the distinct rate
    arrays so the attitude channels are integrated once per distinct rate.
    """
    n = acts.shape[0]
    one = np.empty((n, 8))
    term = np.empty((n, 8))
    valid = np.ones(n, dtype=np.bool_)
    bound = HALF_PI - gamma_margin
    sa, ca, alp_after = _channel(start[7], alpha_rates, dt, n_steps, alpha_min, alpha_max, False)
    sp, cp, phi_after = _channel(start[6], phi_rates, dt, n_steps, 0.0, 0.0, True)
    for k in range(n):
        x, y, z, v, gam, psi = start[0], start[1], start[2], start[3], start[4], start[5]
        n_x = acts[k, 2]
        ua = alpha_idx[k]
        up = phi_idx[k]
        # roll picks up pi each time the flight path passes through vertical
        flip = 1.0
        ok = v > 0 and abs(gam) < degenerate_gamma
        for i in range(n_steps):
            cg = math.cos(gam)
            sg = math.sin(gam)
            n_f = n_x * sa[ua, i] + LIFT
            v_dot = G * (n_x * ca[ua, i] - sg)
            gamma_dot = (G / v) * (n_f * flip * cp[up, i] - cg)
            psi_dot = G * n_f * flip * sp[up, i] / (v * cg)
            if psi_dot > psi_dot_max:
                psi_dot = psi_dot_max
            elif psi_dot < -psi_dot_max:
                psi_dot = -psi_dot_max
            vh = v * cg
            x = x + dt * (vh * math.cos(psi))
            y = y + dt * (vh * math.sin(psi))
            z = z + dt * (-v * sg)
            v = v + dt * v_dot
            gam = gam + dt * gamma_dot
            psi = psi + dt * psi_dot
            v = min(max(v, v_min), v_max)
            if abs(gam) > HALF_PI:
                gam = math.copysign(math.pi, gam) - gam
                psi = psi + math.pi
                flip = -flip
            gam = min(max(gam, -bound), bound)
            psi = _wrap(psi)
            if not (v > 0 and abs(gam) < degenerate_gamma and math.isfinite(x + y + z + v + psi)):
                ok = False
            if i == 0:
                _store(one, k, x, y, z, v, gam, psi, phi_after[up, 0], flip, alp_after[ua, 0])
        _store(term, k, x, y, z, v, gam, psi, phi_after[up, n_steps - 1], flip, alp_after[ua, n_steps - 1])
        valid[k] = ok
    return one, term, valid


@njit(cache=True, inline="always")
def _store(out, k, x, y, z, v, gam, psi, phi, flip, alp):
    out[k, 0] = x
    out[k, 1] = y
    out[k, 2] = z
    out[k, 3] = v
    out[k, 4] = gam
    out[k, 5] = psi
    out[k, 6] = phi if flip > 0 else _wrap(phi + math.pi)
    out[k, 7] = alp


@njit(cache=True)
def surface(points, pos_loc, pos_mag, pos_ld, neg_loc, neg_mag, neg_ld, neg_radius, h_penalty, weight):
    n = points.shape[0]
    pos_max = np.zeros(n)
    neg_max = np.zeros(n)
    deck = np.zeros(n)
    total = np.empty(n)
    for i in range(n):
        px, py, pz = points[i, 0], points[i, 1], points[i, 2]
        best = 0.0
        for j in range(pos_mag.shape[0]):
            dx = px - pos_loc[j, 0]
            dy = py - pos_loc[j, 1]
            dz = pz - pos_loc[j, 2]
            d = math.sqrt(dx * dx + dy * dy + dz * dz)
            val = pos_mag[j] * math.exp(d * pos_ld[j])
            if val > best:
                best = val
        worst = 0.0
        for j in range(neg_mag.shape[0]):
            dx = px - neg_loc[j, 0]
            dy = py - neg_loc[j, 1]
            dz = pz - neg_loc[j, 2]
            d = math.sqrt(dx * dx + dy * dy + dz * dz)
            if d < neg_radius[j]:
                val = neg_mag[j] * math.exp(d * neg_ld[j])
                if val > worst:
                    worst = val
        # altitude is -z
        depth = h_penalty + pz
        dk = weight * depth if depth > 0.0 else 0.0
        pos_max[i] = best
        neg_max[i] = worst
        deck[i] = dk
        total[i] = best - worst - dk
    return pos_max, neg_max, deck, total
