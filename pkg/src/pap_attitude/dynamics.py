"""Rigid-body attitude error dynamics, target trajectory and disturbance models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import quaternion as quat

DEG = np.pi / 180.0

DEFAULT_INERTIA = np.array(
    [
        [2.8, 0.1, 0.5],
        [0.1, 2.5, 0.24],
        [0.5, 0.24, 1.9],
    ]
)


@dataclass(frozen=True)
class SpacecraftParams:
    """Inertia (kg m^2) and per-axis torque limit (N m).

    Derived quantities (inverse, extreme eigenvalues) are cached at construction.
    """

    J: np.ndarray = field(default_factory=lambda: DEFAULT_INERTIA.copy())
    u_max: float = 0.05

    def __post_init__(self):
        J = np.array(self.J, dtype=float)
        if J.shape != (3, 3):
            raise ValueError("inertia must be 3x3")
        if np.max(np.abs(J - J.T)) > 1e-12:
            raise ValueError("inertia must be symmetric")
        eig = np.linalg.eigvalsh(J)
        if eig[0] <= 0.0:
            raise ValueError("inertia must be positive definite")
        if not self.u_max > 0.0:
            raise ValueError("u_max must be positive")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "J_inv", np.linalg.inv(J))
        object.__setattr__(self, "lambda_min", float(eig[0]))
        object.__setattr__(self, "lambda_max", float(eig[-1]))


@dataclass(frozen=True)
class TargetState:
    q_d: np.ndarray
    omega_d: np.ndarray
    omega_d_dot: np.ndarray


def coupling_term(q_e, omega_e, target: TargetState, params: SpacecraftParams) -> np.ndarray:
    """Omega_e = J w_e^x C_e w_d - J C_e w_d_dot - w_s^x J w_s, with w_s = w_e + C_e w_d."""
    J = params.J
    C_e = quat.rotation_matrix(q_e)
    cw_d = C_e @ target.omega_d
    omega_s = omega_e + cw_d
    return (
        J @ np.cross(omega_e, cw_d)
        - J @ (C_e @ target.omega_d_dot)
        - np.cross(omega_s, J @ omega_s)
    )


def error_derivative(q_e, omega_e, target: TargetState, u, d, params: SpacecraftParams):
    """Right-hand side of the error model. Returns ``(q_e_dot, omega_e_dot)``.

    ``u`` must already be saturated.
    """
    q_dot = quat.kinematics(q_e, omega_e)
    w_dot = params.J_inv @ (coupling_term(q_e, omega_e, target, params) + u + d)
    return q_dot, w_dot


def target_derivative(target: TargetState) -> np.ndarray:
    return quat.kinematics(target.q_d, target.omega_d)


def eval_omega_d(t: float, amplitude_deg: float = 0.3):
    """Reference rate ``0.3 [cos(t/80), sin(t/100), -cos(t/100)]`` deg/s, returned in rad/s.

    Returns ``(omega_d, omega_d_dot)``; the derivative is analytic.
    """
    a = amplitude_deg * DEG
    omega = a * np.array([np.cos(t / 80.0), np.sin(t / 100.0), -np.cos(t / 100.0)])
    omega_dot = a * np.array(
        [-np.sin(t / 80.0) / 80.0, np.cos(t / 100.0) / 100.0, np.sin(t / 100.0) / 100.0]
    )
    return omega, omega_dot


@dataclass(frozen=True)
class DisturbanceModel:
    """External torque model.

    ``kind`` is ``"periodic"``, ``"pulse"`` or ``"composite"`` (periodic + pulse).
    The periodic rows are the three-harmonic expression with a constant bias,
    scaled by ``periodic_scale`` (N m); ``periodic_scale = 0`` disables it.
    """

    kind: str = "periodic"
    omega_p: float = 0.01
    periodic_scale: float = 1e-4
    pulse: tuple[float, float, float] = (0.0, 0.0, 0.0)
    pulse_start: float = 0.0
    pulse_duration: float = 0.0

    def __post_init__(self):
        if self.kind not in ("periodic", "pulse", "composite", "none"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.pulse_duration < 0.0:
            raise ValueError("pulse duration must be non-negative")
        if not np.all(np.isfinite(self.pulse)) or not np.isfinite(self.periodic_scale):
            raise ValueError("disturbance amplitudes must be finite")

    def periodic_part(self, t: float) -> np.ndarray:
        w = self.omega_p
        return self.periodic_scale * np.array(
            [
                np.sin(3 * w * t) + 4 * np.cos(3 * w * t) - 20.0,
                5 * np.sin(2 * w * t) + 3 * np.cos(3 * w * t) + 20.0,
                3 * np.sin(2 * w * t) - np.cos(4 * w * t) + 20.0,
            ]
        )

    def pulse_part(self, t: float) -> np.ndarray:
        if self.pulse_start <= t < self.pulse_start + self.pulse_duration:
            return np.asarray(self.pulse, dtype=float)
        return np.zeros(3)


def eval_disturbance(model: DisturbanceModel, t: float) -> np.ndarray:
    d = np.zeros(3)
    if model.kind in ("periodic", "composite"):
        d = d + model.periodic_part(t)
    if model.kind in ("pulse", "composite"):
        d = d + model.pulse_part(t)
    return d
