"""PAP control law: barrier functions, Sontag gains, virtual and actual control."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import quaternion as quat
from .dynamics import SpacecraftParams, TargetState, coupling_term


@dataclass(frozen=True)
class ControllerGains:
    """Scalar design constants of the controller.

    Defaults follow the published tuning except ``C_s`` and ``gamma``: a 1e7
    tanh slope chatters under a 0.1 s zero-order hold, and ``gamma`` is free.
    """

    K_H: float = 2.0
    K_h: float = 1.0
    K_s: float = 0.1
    K_2: float = 2.0
    alpha: float = 0.5
    gamma: float = 0.05
    delta_H: float = 1e-5
    delta_h: float = 2e-3
    sigma1: float = 0.05
    sigma2: float = 1.0
    C_s: float = 500.0
    eps: float = 1e-7
    Delta_e: float = 1e-5
    Delta_h: float = 1e-5

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"gain {f.name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class ControlOutputs:
    s: np.ndarray
    H: float
    h: float
    lambda_v: float
    lambda_u: float
    omega_v: np.ndarray
    omega_v_dot: np.ndarray
    z2: np.ndarray
    u_raw: np.ndarray
    u_sat: np.ndarray


def tracking_error(q_ev, rho) -> np.ndarray:
    return np.asarray(q_ev, dtype=float) - rho


def barrier_H(s, g: ControllerGains) -> float:
    return g.K_H * (g.Delta_e**2 - s @ s)


def barrier_h(z2, g: ControllerGains) -> float:
    return g.K_h * (g.Delta_h**2 - z2 @ z2)


def _sontag_num(A: float, B: float, sigma: float):
    """Return ``(R, A + R)`` with ``R = sqrt(A^2 + sigma B^2)``, cancellation-free for A < 0."""
    R = np.hypot(A, np.sqrt(sigma) * B)
    if A < 0.0:
        return R, sigma * B * B / (R - A)
    return R, A + R


def sontag_lambda(A: float, B: float, sigma: float, eps: float) -> float:
    """Sontag-type gain ``(-A - sqrt(A^2 + sigma B^2)) / (B + eps)``.

    Always non-positive and zero at ``B == 0`` whenever ``A <= 0``. The
    regularized formula is used at ``B == 0`` too, so the gain is continuous
    on ``B >= 0``. With ``eps = 0`` it satisfies
    ``A + B * lambda = -sqrt(A^2 + sigma B^2)``.
    """
    den = B + eps
    if den == 0.0:
        return 0.0
    return -_sontag_num(A, B, sigma)[1] / den


def sontag_partials(A: float, B: float, sigma: float, eps: float):
    """Partial derivatives ``(d lambda/dA, d lambda/dB)`` of :func:`sontag_lambda` for B > 0."""
    R, ApR = _sontag_num(A, B, sigma)
    den = B + eps
    if R == 0.0:
        return -1.0 / den, 0.0
    dA = -ApR / (R * den)
    dB = -sigma * B / (R * den) + ApR / den**2
    return dA, dB


def a1_b1(s, H: float, g: ControllerGains):
    A1 = -g.alpha * H + g.delta_H * np.linalg.norm(np.tanh(g.C_s * s))
    B1 = 4.0 * g.K_H**2 * (s @ s)
    return A1, B1


def a2_b2(z2, h: float, g: ControllerGains, params: SpacecraftParams):
    A2 = -params.lambda_min**2 * (g.gamma * h - g.delta_h * np.linalg.norm(z2))
    Jz = params.J @ z2
    B2 = 4.0 * g.K_h**2 * (Jz @ Jz)
    return A2, B2


def virtual_control(q_e, s, rho_dot, g: ControllerGains):
    """Return ``(omega_v, lambda_v)``."""
    H = barrier_H(s, g)
    A1, B1 = a1_b1(s, H, g)
    lam = sontag_lambda(A1, B1, g.sigma1, g.eps)
    w = (2.0 * lam * g.K_H - g.K_s) * s + rho_dot
    return quat.fe_inverse(q_e) @ w, lam


def _sech2(x):
    with np.errstate(over="ignore"):
        return 1.0 / np.cosh(x) ** 2


def virtual_control_derivative(q_e, omega_e, s, rho_dot, rho_ddot, g: ControllerGains) -> np.ndarray:
    """Analytic time derivative of the virtual control along the error dynamics."""
    Fe = quat.fe_matrix(q_e)
    Fe_inv = quat.fe_inverse(q_e)
    H = barrier_H(s, g)
    A1, B1 = a1_b1(s, H, g)
    lam = sontag_lambda(A1, B1, g.sigma1, g.eps)
    gain = 2.0 * lam * g.K_H - g.K_s

    s_dot = Fe @ omega_e - rho_dot
    lam_dot = 0.0
    if B1 >= g.eps:
        H_dot = -2.0 * g.K_H * (s @ s_dot)
        th = np.tanh(g.C_s * s)
        nth = np.linalg.norm(th)
        tanh_rate = 0.0
        if nth > 0.0:
            tanh_rate = g.delta_H * (th @ (g.C_s * _sech2(g.C_s * s) * s_dot)) / nth
        A1_dot = -g.alpha * H_dot + tanh_rate
        B1_dot = 8.0 * g.K_H**2 * (s @ s_dot)
        dA, dB = sontag_partials(A1, B1, g.sigma1, g.eps)
        lam_dot = dA * A1_dot + dB * B1_dot

    qev = np.asarray(q_e[:3])
    Fe_dot = 0.5 * (-0.5 * (qev @ omega_e) * np.eye(3) + quat.skew(Fe @ omega_e))
    Fe_inv_dot = -Fe_inv @ Fe_dot @ Fe_inv
    w = gain * s + rho_dot
    w_dot = 2.0 * g.K_H * (lam_dot * s + lam * s_dot) - g.K_s * s_dot + rho_ddot
    return Fe_inv_dot @ w + Fe_inv @ w_dot


def actual_control(q_e, omega_e, target: TargetState, z2, omega_v_dot, d_hat,
                   g: ControllerGains, params: SpacecraftParams):
    """Return ``(u_raw, u_sat, lambda_u)``."""
    h = barrier_h(z2, g)
    A2, B2 = a2_b2(z2, h, g, params)
    lam_u = sontag_lambda(A2, B2, g.sigma2, g.eps)
    J = params.J
    Omega_e = coupling_term(q_e, omega_e, target, params)
    u_raw = -Omega_e - d_hat + J @ omega_v_dot + (2.0 * lam_u * g.K_h - g.K_2) * (J @ z2)
    u_sat = np.clip(u_raw, -params.u_max, params.u_max)
    return u_raw, u_sat, lam_u


def compute_control(q_e, omega_e, target: TargetState, rho, rho_dot, rho_ddot, d_hat,
                    g: ControllerGains, params: SpacecraftParams) -> ControlOutputs:
    """One full controller evaluation."""
    s = tracking_error(q_e[:3], rho)
    omega_v, lam_v = virtual_control(q_e, s, rho_dot, g)
    omega_v_dot = virtual_control_derivative(q_e, omega_e, s, rho_dot, rho_ddot, g)
    z2 = omega_e - omega_v
    u_raw, u_sat, lam_u = actual_control(q_e, omega_e, target, z2, omega_v_dot, d_hat, g, params)
    return ControlOutputs(
        s=s,
        H=barrier_H(s, g),
        h=barrier_h(z2, g),
        lambda_v=lam_v,
        lambda_u=lam_u,
        omega_v=omega_v,
        omega_v_dot=omega_v_dot,
        z2=z2,
        u_raw=u_raw,
        u_sat=u_sat,
    )
