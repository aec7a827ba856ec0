import numpy as np
import pytest
from mpmath import mp, matrix

from pap_attitude import quaternion as quat
from pap_attitude.dynamics import (DEG, DEFAULT_INERTIA, DisturbanceModel, SpacecraftParams, TargetState,
                                   coupling_term, error_derivative, eval_disturbance, eval_omega_d,
                                   target_derivative)
from pap_attitude.sim import rk4_step

P = SpacecraftParams()
Z = np.zeros(3)


def target(omega_d=Z, omega_d_dot=Z, q_d=quat.IDENTITY):
    return TargetState(np.asarray(q_d, float), np.asarray(omega_d, float), np.asarray(omega_d_dot, float))


def test_params_validation():
    with pytest.raises(ValueError):
        SpacecraftParams(J=np.array([[1, 0.1, 0], [0, 1, 0], [0, 0, 1.0]]))
    with pytest.raises(ValueError):
        SpacecraftParams(J=-np.eye(3))
    assert P.lambda_min > 0 and np.allclose(P.J_inv @ P.J, np.eye(3))


def test_coupling_zero_cases():
    assert np.array_equal(coupling_term(quat.IDENTITY, Z, target(), P), Z)
    diag = SpacecraftParams(J=np.diag([2.8, 2.5, 1.9]))
    assert np.allclose(coupling_term(quat.IDENTITY, np.array([0.1, 0, 0]), target(), diag), 0, atol=1e-15)


def test_coupling_extended_precision():
    mp.dps = 40
    we, wd = [0.01, 0.02, 0.03], [0.005, 0.0, -0.005]
    J = matrix(DEFAULT_INERTIA.tolist())
    cross = lambda a, b: matrix([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
    we_m, wd_m = matrix(we), matrix(wd)
    ws = we_m + wd_m  # C_e = I at identity
    ref = J * cross(we_m, wd_m) - cross(ws, J * ws)
    got = coupling_term(quat.IDENTITY, np.array(we), target(wd), P)
    assert np.allclose(got, [float(v) for v in ref], rtol=1e-14, atol=1e-18)


def test_coupling_quadratic_scaling():
    ws = np.array([0.1, -0.2, 0.3])
    a = coupling_term(quat.IDENTITY, ws, target(), P)
    b = coupling_term(quat.IDENTITY, 3 * ws, target(), P)
    assert np.allclose(b, 9 * a)


def test_error_derivative_equilibrium(rng):
    q = quat.random_unit(rng)
    t = target([0.01, 0, -0.01], [0.001, 0.002, 0])
    u = -coupling_term(q, Z, t, P)
    qd, wd = error_derivative(q, Z, t, u, Z, P)
    assert np.allclose(qd, 0) and np.allclose(wd, 0, atol=1e-16)


def test_error_derivative_hand_case():
    w = np.array([0.2, 0, 0])
    qd, wd = error_derivative(quat.IDENTITY, w, target(), Z, Z, P)
    assert np.allclose(qd, [0.1, 0, 0, 0])
    assert np.allclose(wd, P.J_inv @ (-np.cross(w, P.J @ w)))


def test_error_derivative_norm(rng):
    for _ in range(200):
        q = quat.random_unit(rng)
        qd, _ = error_derivative(q, rng.normal(size=3), target(rng.normal(size=3) * 0.01), Z, Z, P)
        assert abs(q @ qd) < 1e-15


def test_target_derivative():
    assert np.array_equal(target_derivative(target()), np.zeros(4))
    assert np.allclose(target_derivative(target([0.01, 0, 0])), [0.005, 0, 0, 0])


def test_equilibrium_hold():
    t = target()
    def f(_, x):
        q, w = x[:4], x[4:]
        u = -coupling_term(q, w, t, P)
        qd, wd = error_derivative(q, w, t, u, Z, P)
        return np.r_[qd, wd]
    x = np.r_[quat.normalize([0.1, 0.2, 0.3, 0.9]), Z]
    for k in range(1000):
        x = rk4_step(f, x, 0.1 * k, 0.1, (slice(0, 4),))
    assert np.max(np.abs(x[4:])) < 1e-12


def test_omega_d():
    w, wd = eval_omega_d(0.0)
    assert np.allclose(w, 0.3 * DEG * np.array([1, 0, -1]))
    assert np.allclose(wd, 0.3 * DEG * np.array([0, 1 / 100, 0]))
    h = 1e-4
    for t in (10, 50, 200):
        fd = (eval_omega_d(t + h)[0] - eval_omega_d(t - h)[0]) / (2 * h)
        assert np.max(np.abs(eval_omega_d(t)[1] - fd)) < 1e-9


def test_disturbance_periodic():
    m = DisturbanceModel()
    assert np.allclose(eval_disturbance(m, 0.0), [-1.6e-3, 2.3e-3, 1.9e-3])
    ts = np.linspace(0, 1000, 20001)
    vals = np.abs([eval_disturbance(m, t) for t in ts])
    # Per-row ceilings from the amplitudes: 20+sqrt(17), 20+5+3, 20+sqrt(10)+1 (x1e-4).
    assert np.all(vals.max(axis=0) <= 1e-4 * np.array([20 + np.sqrt(17), 28, 21 + np.sqrt(10)]))
    assert vals.max() > 2.7e-3


def test_disturbance_pulse():
    m = DisturbanceModel(kind="composite", pulse=(0.5, 0.5, 0.5), pulse_start=100, pulse_duration=0.5)
    base = DisturbanceModel()
    assert np.allclose(eval_disturbance(m, 99.9), eval_disturbance(base, 99.9))
    assert np.allclose(eval_disturbance(m, 100.2) - eval_disturbance(base, 100.2), 0.5)
    assert np.allclose(eval_disturbance(m, 100.5), eval_disturbance(base, 100.5))
    with pytest.raises(ValueError):
        DisturbanceModel(kind="pulse", pulse_duration=-1)


def test_error_model_matches_absolute_attitude(rng):
    """Integrate spacecraft and target separately and compare with the error-coordinate model."""
    u = np.array([0.01, -0.02, 0.015])
    dist = DisturbanceModel()

    def absolute(t, x):
        q_s, w_s, q_d = x[:4], x[4:7], x[7:]
        w_d, _ = eval_omega_d(t)
        w_dot = P.J_inv @ (-np.cross(w_s, P.J @ w_s) + u + eval_disturbance(dist, t))
        return np.r_[quat.kinematics(q_s, w_s), w_dot, quat.kinematics(q_d, w_d)]

    def error(t, x):
        q_e, w_e, q_d = x[:4], x[4:7], x[7:]
        w_d, w_d_dot = eval_omega_d(t)
        tgt = TargetState(q_d, w_d, w_d_dot)
        qd, wd = error_derivative(q_e, w_e, tgt, u, eval_disturbance(dist, t), P)
        return np.r_[qd, wd, target_derivative(tgt)]

    q_s, q_d = quat.normalize([0.3, -0.2, 0.5, 0.8]), quat.normalize([0.1, 0.0, -0.1, 1.0])
    w_s = np.array([0.02, -0.01, 0.03])
    q_e = quat.quat_error(q_d, q_s)
    w_e = w_s - quat.rotation_matrix(q_e) @ eval_omega_d(0.0)[0]
    xa, xe = np.r_[q_s, w_s, q_d], np.r_[q_e, w_e, q_d]
    blocks = (slice(0, 4), slice(7, 11))
    for k in range(2000):
        xa = rk4_step(absolute, xa, 0.01 * k, 0.01, blocks)
        xe = rk4_step(error, xe, 0.01 * k, 0.01, blocks)
    q_e_ref = quat.quat_error(xa[7:], xa[:4])
    w_e_ref = xa[4:7] - quat.rotation_matrix(q_e_ref) @ eval_omega_d(20.0)[0]
    assert np.allclose(xe[:4], q_e_ref, atol=1e-10)
    assert np.allclose(xe[4:7], w_e_ref, atol=1e-10)
