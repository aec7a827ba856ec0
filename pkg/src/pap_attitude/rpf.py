"""Quartic reference performance function with a C^2 junction to zero."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidHorizon


@dataclass(frozen=True)
class RpfPoly:
    """Per-axis quartic ``rho(t) = sum a_j t^j`` on ``[0, t_sd]``, zero afterwards.

    ``coeffs`` has shape ``(5,)`` for one axis or ``(3, 5)`` for three.
    """

    coeffs: np.ndarray
    t_sd: float


def fit_rpf(a0, t_sd: float) -> RpfPoly:
    """Fit the quartic from rho(0)=a0, rho'(0)=0 and rho=rho'=rho''=0 at t_sd.

    The closed form is ``a0 * (1 - 6 x^2 + 8 x^3 - 3 x^4)`` with ``x = t / t_sd``.
    ``a0`` may be a scalar or a 3-vector.
    """
    if not t_sd > 0.0:
        raise InvalidHorizon(f"t_sd must be positive, got {t_sd}")
    a0 = np.asarray(a0, dtype=float)
    T = float(t_sd)
    shape = np.array([1.0, 0.0, -6.0 / T**2, 8.0 / T**3, -3.0 / T**4])
    return RpfPoly(coeffs=a0[..., None] * shape, t_sd=T)


def eval_rpf(p: RpfPoly, t: float):
    """Return ``(rho, rho_dot, rho_ddot)``; all zero for ``t > t_sd``."""
    a = p.coeffs
    if t > p.t_sd:
        z = np.zeros(a.shape[:-1]) if a.ndim > 1 else 0.0
        return z, z, z
    a0, a1, a2, a3, a4 = np.moveaxis(a, -1, 0)
    rho = a0 + t * (a1 + t * (a2 + t * (a3 + t * a4)))
    rho_dot = a1 + t * (2 * a2 + t * (3 * a3 + t * 4 * a4))
    rho_ddot = 2 * a2 + t * (6 * a3 + t * 12 * a4)
    return rho, rho_dot, rho_ddot
