"""Compiled inner loop for the zero-order-hold integration.

Mirrors ``sim.closed_loop_field`` (plant + target + observer) term by term;
``tests/test_sim.py`` checks the two against each other.
"""

import numpy as np
from numba import njit

DEG = np.pi / 180.0


@njit(cache=True)
def _cross(a, b):
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


@njit(cache=True)
def _mv(M, v):
    return np.array(
        [
            M[0, 0] * v[0] + M[0, 1] * v[1] + M[0, 2] * v[2],
            M[1, 0] * v[0] + M[1, 1] * v[1] + M[1, 2] * v[2],
            M[2, 0] * v[0] + M[2, 1] * v[1] + M[2, 2] * v[2],
        ]
    )


@njit(cache=True)
def _kin(q, w, out, o):
    x, y, z, s = q[0], q[1], q[2], q[3]
    out[o + 0] = 0.5 * (s * w[0] - z * w[1] + y * w[2])
    out[o + 1] = 0.5 * (z * w[0] + s * w[1] - x * w[2])
    out[o + 2] = 0.5 * (-y * w[0] + x * w[1] + s * w[2])
    out[o + 3] = -0.5 * (x * w[0] + y * w[1] + z * w[2])


@njit(cache=True)
def _dcm_t(q, v):
    # C(q) v = (q0^2 - |qv|^2) v + 2 qv (qv.v) - 2 q0 qv x v
    x, y, z, s = q[0], q[1], q[2], q[3]
    qv = np.array([x, y, z])
    c = s * s - (x * x + y * y + z * z)
    dot = x * v[0] + y * v[1] + z * v[2]
    cr = _cross(qv, v)
    return c * v + 2.0 * dot * qv - 2.0 * s * cr


@njit(cache=True)
def rhs(t, x, u, J, Jinv, amp, dist, obs):
    """dist = [periodic_on, scale, omega_p, pulse_on, px, py, pz, start, duration]."""
    out = np.empty(17)
    qe = x[0:4]
    we = x[4:7]
    qd = x[7:11]
    a = amp * DEG
    wd = a * np.array([np.cos(t / 80.0), np.sin(t / 100.0), -np.cos(t / 100.0)])
    wdd = a * np.array([-np.sin(t / 80.0) / 80.0, np.cos(t / 100.0) / 100.0, np.sin(t / 100.0) / 100.0])
    d = np.zeros(3)
    if dist[0] != 0.0:
        wp = dist[2]
        d[0] = np.sin(3 * wp * t) + 4 * np.cos(3 * wp * t) - 20.0
        d[1] = 5 * np.sin(2 * wp * t) + 3 * np.cos(3 * wp * t) + 20.0
        d[2] = 3 * np.sin(2 * wp * t) - np.cos(4 * wp * t) + 20.0
        d = d * dist[1]
    if dist[3] != 0.0 and dist[7] <= t < dist[7] + dist[8]:
        d[0] += dist[4]
        d[1] += dist[5]
        d[2] += dist[6]
    cwd = _dcm_t(qe, wd)
    ws = we + cwd
    Omega = _mv(J, _cross(we, cwd)) - _mv(J, _dcm_t(qe, wdd)) - _cross(ws, _mv(J, ws))
    _kin(qe, we, out, 0)
    wdot = _mv(Jinv, Omega + u + d)
    out[4:7] = wdot
    _kin(qd, wd, out, 7)
    e1 = x[11:14] - we
    out[11:14] = _mv(Jinv, Omega + u) + x[14:17] - obs[0] * obs[2] * e1
    out[14:17] = -obs[1] * obs[2] * obs[2] * e1
    return out


@njit(cache=True)
def hold_interval(x, t, h, n, u, J, Jinv, amp, dist, obs):
    """Integrate ``n`` RK4 substeps of size ``h`` with torque ``u`` held fixed."""
    for j in range(n):
        tj = t + j * h
        k1 = rhs(tj, x, u, J, Jinv, amp, dist, obs)
        k2 = rhs(tj + 0.5 * h, x + 0.5 * h * k1, u, J, Jinv, amp, dist, obs)
        k3 = rhs(tj + 0.5 * h, x + 0.5 * h * k2, u, J, Jinv, amp, dist, obs)
        k4 = rhs(tj + h, x + h * k3, u, J, Jinv, amp, dist, obs)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        for i in range(17):
            if not np.isfinite(x[i]):
                return x, False
        n1 = np.sqrt(x[0] ** 2 + x[1] ** 2 + x[2] ** 2 + x[3] ** 2)
        n2 = np.sqrt(x[7] ** 2 + x[8] ** 2 + x[9] ** 2 + x[10] ** 2)
        x[0:4] = x[0:4] / n1
        x[7:11] = x[7:11] / n2
    return x, True
