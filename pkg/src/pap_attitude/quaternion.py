"""Quaternion and 3x3 helpers.

Quaternions are stored scalar-last as ``[x, y, z, w]`` and composed with the
Hamilton product.  Kinematics follow ``q_dot = 0.5 * q (x) [omega, 0]`` with
``omega`` resolved in the body frame, which is what makes ``F_e`` the Jacobian
of the vector part.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularJacobian

IDENTITY = np.array([0.0, 0.0, 0.0, 1.0])

# Below this |q_e0| the attitude error is treated as a 180 degree flip.
SINGULAR_GUARD = 1e-6


def skew(a) -> np.ndarray:
    """Cross-product matrix: ``skew(a) @ b == cross(a, b)``."""
    x, y, z = a
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def conjugate(q) -> np.ndarray:
    return np.array([-q[0], -q[1], -q[2], q[3]])


def multiply(p, q) -> np.ndarray:
    """Hamilton product ``p (x) q`` for scalar-last quaternions."""
    pv, p0 = np.asarray(p[:3]), p[3]
    qv, q0 = np.asarray(q[:3]), q[3]
    vec = p0 * qv + q0 * pv + np.cross(pv, qv)
    return np.array([vec[0], vec[1], vec[2], p0 * q0 - pv @ qv])


def quat_error(q_d, q_s) -> np.ndarray:
    """Attitude error ``conj(q_d) (x) q_s`` (body frame relative to target frame)."""
    return normalize(multiply(conjugate(q_d), q_s))


def rotation_matrix(q) -> np.ndarray:
    """Direction cosine matrix C(q) mapping target-frame components to body-frame.

    Equivalent to ``v -> conj(q) (x) v (x) q``; for the attitude error this is C_e.
    """
    qv = np.asarray(q[:3], dtype=float)
    q0 = q[3]
    return (q0 * q0 - qv @ qv) * np.eye(3) + 2.0 * np.outer(qv, qv) - 2.0 * q0 * skew(qv)


def fe_matrix(q) -> np.ndarray:
    """Kinematic Jacobian ``F_e = 0.5 (q_e0 I + q_ev^x)``."""
    return 0.5 * (q[3] * np.eye(3) + skew(q[:3]))


def fe_inverse(q) -> np.ndarray:
    """Closed-form inverse of ``fe_matrix(q)`` for a unit quaternion.

    ``(q0 I + v^x)^-1 = (q0^2 I + v v^T - q0 v^x) / (q0 (q0^2 + |v|^2))``.
    """
    qv = np.asarray(q[:3], dtype=float)
    q0 = q[3]
    if abs(q0) < SINGULAR_GUARD:
        raise SingularJacobian(q0)
    n2 = q0 * q0 + qv @ qv
    return 2.0 * (q0 * q0 * np.eye(3) + np.outer(qv, qv) - q0 * skew(qv)) / (q0 * n2)


def kinematics(q, omega) -> np.ndarray:
    """``q_dot = 0.5 * q (x) [omega, 0]`` (body-frame rate)."""
    qv = np.asarray(q[:3], dtype=float)
    vec = fe_matrix(q) @ omega
    return np.array([vec[0], vec[1], vec[2], -0.5 * (qv @ omega)])


def random_unit(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform samples on the unit 3-sphere (uniform rotations)."""
    shape = (4,) if size is None else (size, 4)
    g = rng.standard_normal(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)
