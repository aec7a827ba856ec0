"""Performance metrics, attraction-time bounds and barrier-condition monitoring."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .controller import ControllerGains
from .dynamics import SpacecraftParams
from .errors import EmptyTrace, InfeasibleConstants
from .observer import ObserverParams

NAN = float("nan")


@dataclass(frozen=True)
class PerformanceReport:
    """Per-run metrics. Absent times are ``None``."""

    settling_time: tuple
    steady_state_max: tuple
    overshoot: tuple
    tube_entry_time: float | None
    h_entry_time: float | None
    pap_satisfied: bool
    pap_violations: int = 0


@dataclass(frozen=True)
class TheoryBounds:
    """Constants and worst-case attraction times. Times are NaN until computed."""

    delta_S: float
    delta_z: float
    D_e: float = NAN
    feasible: bool = False
    T_H1: float = NAN
    T_h: float = NAN
    T_H2: float = NAN
    G_B: float = NAN
    H_B: float = NAN


class Violation(NamedTuple):
    index: int
    t: float
    margin: float


def _series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise EmptyTrace("trace is empty")
    return x


def settling_time(t, x, delta_e: float):
    """Earliest sample time after which ``|x| < delta_e`` holds for every later sample.

    Returns ``None`` if the last sample is outside the band.
    """
    t = _series(t)
    bad = np.nonzero(np.abs(_series(x)) >= delta_e)[0]
    if bad.size == 0:
        return float(t[0])
    k = bad[-1] + 1
    return float(t[k]) if k < len(t) else None


def entry_time(t, positive) -> float | None:
    """First time after which the boolean series stays true; ``None`` if it ends false."""
    t = _series(t)
    bad = np.nonzero(~np.asarray(positive, dtype=bool))[0]
    if bad.size == 0:
        return float(t[0])
    k = bad[-1] + 1
    return float(t[k]) if k < len(t) else None


def overshoot(x, initial_sign: float | None = None) -> float:
    """Largest excursion to the side opposite the initial sign, zero if none."""
    x = _series(x)
    sgn = np.sign(x[0]) if initial_sign is None else np.sign(initial_sign)
    if sgn == 0:
        return 0.0
    return float(max(0.0, -np.min(sgn * x)))


def observer_q2(op: ObserverParams, c_P: float = 1.0) -> np.ndarray:
    """Solve ``P^T Q + Q P = -c_P I`` for the observer error in ``(beta e1, e2)`` coordinates."""
    P = op.beta * np.array([[-op.C1, 1.0], [-op.C2, 0.0]])
    return solve_continuous_lyapunov(P.T, -c_P * np.eye(2))


def derived_constants(g: ControllerGains, params: SpacecraftParams, op: ObserverParams,
                      xi_m: float, h_m: float | None = None, chi: float | None = None,
                      C_d: float | None = None, c_P: float = 1.0) -> TheoryBounds:
    """Compute ``delta_S``, ``delta_z`` and, when ``h_m, chi, C_d`` are given, ``D_e``."""
    if xi_m < 0:
        raise ValueError("xi_m must be non-negative")
    delta_S = g.delta_H - g.K_H * g.Delta_h
    delta_z = g.delta_h - 2.0 * g.K_h * xi_m / params.lambda_min
    D_e = NAN
    if h_m is not None and chi is not None and C_d is not None:
        q_min = np.linalg.eigvalsh(observer_q2(op, c_P)).min()
        D_e = params.lambda_max * np.sqrt(h_m / (chi * C_d * q_min))
    return TheoryBounds(delta_S=delta_S, delta_z=delta_z, D_e=float(D_e),
                        feasible=bool(delta_S > 0 and delta_z > 0))


def gb_bound(alpha: float, gamma: float, n: float) -> float:
    """Peak of the z2-coupling term in the lower bound of H over ``[0, T_h]``."""
    if n == 0.0:
        return 0.0
    r = gamma / (2.0 * alpha)
    if np.isclose(r, 1.0, rtol=0.0, atol=1e-12):
        return n / (alpha * np.e)
    return n / (alpha - gamma / 2.0) * np.exp(-gamma / (gamma - 2.0 * alpha) * np.log(r)) * (1.0 - r)


def gb_function(t, alpha: float, gamma: float, n: float):
    """The bounding function whose maximum over ``t >= 0`` is :func:`gb_bound`."""
    t = np.asarray(t, dtype=float)
    if np.isclose(gamma, 2.0 * alpha, rtol=0.0, atol=1e-12):
        return n * t * np.exp(-alpha * t)
    return 2.0 * n / (2.0 * alpha - gamma) * (np.exp(-gamma * t / 2.0) - np.exp(-alpha * t))


def _log_time(rate, start, floor):
    return float(np.log(rate * abs(start) / floor + 1.0) / rate)


def attraction_bounds(H0: float, h0: float, b: TheoryBounds, g: ControllerGains) -> TheoryBounds:
    """Worst-case times for ``H`` and ``h`` to become positive.

    ``T_H1`` covers ``h(0) > 0``; ``T_h + T_H2`` covers ``h(0) <= 0``. With
    ``h(0) > 0`` the second chain degenerates to ``T_h = 0``, ``H_B = H0``.
    """
    if not (b.delta_S > 0 and b.delta_z > 0):
        raise InfeasibleConstants(f"delta_S={b.delta_S:.3g}, delta_z={b.delta_z:.3g} must be positive")
    m = b.delta_S * g.Delta_e
    T_H1 = _log_time(g.alpha, H0, m)
    if h0 > 0:
        T_h, G_B, H_B = 0.0, 0.0, float(H0)
    else:
        T_h = _log_time(g.gamma, h0, b.delta_z * g.Delta_h)
        Z1 = np.sqrt(-h0 / g.K_h)  # sqrt(|z2(0)|^2 - Delta_h^2)
        G_B = gb_bound(g.alpha, g.gamma, g.K_H * Z1 * g.Delta_e)
        decay = np.exp(-g.alpha * T_h)
        H_B = float(H0 * decay + m / g.alpha * (1.0 - decay) - G_B)
    T_H2 = _log_time(g.alpha, H_B, m)
    return replace(b, T_H1=T_H1, T_h=T_h, T_H2=T_H2, G_B=float(G_B), H_B=H_B)


def pap_monitor(t, H, z2, g: ControllerGains, rel_tol: float = 1e-12):
    """Flag samples where the forward-difference rate breaks ``dH/dt > -alpha H``.

    Only samples with ``|z2| < Delta_h`` are checked.
    """
    t, H = _series(t), _series(H)
    z_ok = np.linalg.norm(np.atleast_2d(z2), axis=1) < g.Delta_h
    dt = np.diff(t)
    rate = np.diff(H) / dt
    margin = rate + g.alpha * H[:-1]
    tol = rel_tol * np.maximum(1.0, np.abs(H[:-1]))
    idx = np.nonzero(z_ok[:-1] & (margin < -tol))[0]
    return [Violation(int(k), float(t[k]), float(margin[k])) for k in idx]


def performance_report(trace, g: ControllerGains, steady_from: float | None = None) -> PerformanceReport:
    """Summarize a simulation trace.

    ``steady_from`` defaults to the RPF horizon when the trace carries one.
    """
    t = trace.t
    q = trace.block("qev")
    if steady_from is None:
        steady_from = trace.rpf.t_sd if trace.rpf is not None else t[-1]
    tail = t >= steady_from
    steady = np.abs(q[tail]).max(axis=0) if tail.any() else np.full(3, NAN)
    violations = pap_monitor(t, trace["H"], trace.block("z2"), g)
    return PerformanceReport(
        settling_time=tuple(settling_time(t, q[:, i], g.Delta_e) for i in range(3)),
        steady_state_max=tuple(float(v) for v in steady),
        overshoot=tuple(overshoot(q[:, i]) for i in range(3)),
        tube_entry_time=entry_time(t, trace["H"] > 0),
        h_entry_time=entry_time(t, trace["h"] > 0),
        pap_satisfied=not violations,
        pap_violations=len(violations),
    )
