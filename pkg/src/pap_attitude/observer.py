"""Extended-state disturbance observer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SpacecraftParams


@dataclass(frozen=True)
class ObserverParams:
    """Gains ``C1, C2`` and bandwidth scale ``beta``; defaults put both poles at -1."""

    C1: float = 2.0
    C2: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("C1", "C2", "beta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"observer {name} must be positive, got {v}")

    def error_matrix(self) -> np.ndarray:
        """Per-axis matrix of the ``(e1, e2)`` dynamics, ``e1 = F1_hat - omega_e``,
        ``e2 = F2_hat - J^-1 d``, for a constant disturbance.

        Characteristic polynomial ``l^2 + C1 beta l + C2 beta^2``.
        """
        b = self.beta
        return np.array([[-self.C1 * b, 1.0], [-self.C2 * b * b, 0.0]])


def observer_derivative(F1_hat, F2_hat, omega_e, u_applied, Omega_e,
                        params: SpacecraftParams, op: ObserverParams):
    """Return ``(F1_hat_dot, F2_hat_dot)``."""
    e1 = F1_hat - omega_e
    F1_dot = params.J_inv @ (Omega_e + u_applied) + F2_hat - op.C1 * op.beta * e1
    F2_dot = -op.C2 * op.beta**2 * e1
    return F1_dot, F2_dot


def disturbance_estimate(F2_hat, params: SpacecraftParams) -> np.ndarray:
    return params.J @ F2_hat
