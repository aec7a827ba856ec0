"""Closed-loop simulation: RK4 with zero-order-hold control, scenarios, Monte Carlo."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import quaternion as quat
from .controller import ControllerGains, compute_control
from .dynamics import (
    DEG,
    DisturbanceModel,
    SpacecraftParams,
    TargetState,
    coupling_term,
    error_derivative,
    eval_disturbance,
    eval_omega_d,
    target_derivative,
)
from .errors import NonFiniteState, PapError, SingularJacobian
from .observer import ObserverParams, disturbance_estimate, observer_derivative
from .rpf import RpfPoly, eval_rpf, fit_rpf
from . import _fast

log = logging.getLogger(__name__)

# Flat state layout.
QE, WE, QD, F1, F2 = slice(0, 4), slice(4, 7), slice(7, 11), slice(11, 14), slice(14, 17)
STATE_SIZE = 17
QUAT_BLOCKS = (QE, QD)

TRACE_COLUMNS = (
    ["t", "qev1", "qev2", "qev3", "qe0", "rho1", "rho2", "rho3", "s1", "s2", "s3"]
    + ["ws1", "ws2", "ws3", "we1", "we2", "we3", "z21", "z22", "z23"]
    + ["u1", "u2", "u3", "d1", "d2", "d3", "dhat1", "dhat2", "dhat3"]
    + ["H", "h", "lambda_v", "lambda_u"]
)


def rk4_step(f, x, t: float, dt: float, quat_blocks=()) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step of ``x' = f(t, x)``.

    Each slice in ``quat_blocks`` is renormalized after the update.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    k1 = f(t, x)
    k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = f(t + dt, x + dt * k3)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFiniteState(t + dt)
    for blk in quat_blocks:
        out[blk] = out[blk] / np.linalg.norm(out[blk])
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one closed-loop simulation (SI units, rad)."""

    t_final: float = 200.0
    dt_control: float = 0.1
    dt_inner: float = 0.01
    q_s0: tuple = (0.3482, 0.5222, 0.6963, 0.3482)
    omega_s0: tuple = (0.0, 0.0, 0.0)
    q_d0: tuple = (0.0, 0.0, 0.0, 1.0)
    omega_d_amplitude_deg: float = 0.3
    rpf_offset: tuple = (0.1, 0.1, 0.1)
    t_sd: float = 50.0
    gains: ControllerGains = field(default_factory=ControllerGains)
    observer: ObserverParams = field(default_factory=ObserverParams)
    spacecraft: SpacecraftParams = field(default_factory=SpacecraftParams)
    disturbance: DisturbanceModel = field(default_factory=DisturbanceModel)
    seed: int = 0
    case_count: int = 1

    def __post_init__(self):
        if not self.t_final > 0.0:
            raise ValueError("t_final must be positive")
        if not (self.dt_control > 0.0 and self.dt_inner > 0.0):
            raise ValueError("time steps must be positive")
        ratio = self.dt_control / self.dt_inner
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError("dt_inner must divide dt_control exactly")
        if self.case_count < 1:
            raise ValueError("case_count must be >= 1")
        if not self.t_sd > 0.0:
            raise ValueError("t_sd must be positive")

    @property
    def substeps(self) -> int:
        return int(round(self.dt_control / self.dt_inner))

    @property
    def n_rows(self) -> int:
        return int(np.floor(self.t_final / self.dt_control + 1e-9)) + 1


@dataclass
class SimulationTrace:
    """Rows sampled at the control rate; ``data`` columns follow ``TRACE_COLUMNS``."""

    data: np.ndarray
    rpf: RpfPoly | None = None
    seed: int = 0
    columns: tuple = tuple(TRACE_COLUMNS)

    def __getitem__(self, name):
        return self.data[:, self.columns.index(name)]

    def block(self, prefix: str) -> np.ndarray:
        """Three-column block by prefix, e.g. ``block("qev")`` -> (N, 3)."""
        idx = [self.columns.index(f"{prefix}{i}") for i in (1, 2, 3)]
        return self.data[:, idx]

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]


def _target(x, t, amp):
    w_d, w_d_dot = eval_omega_d(t, amp)
    return TargetState(q_d=x[QD], omega_d=w_d, omega_d_dot=w_d_dot)


def initial_state(cfg: ScenarioConfig) -> np.ndarray:
    q_s = quat.normalize(cfg.q_s0)
    q_d = quat.normalize(cfg.q_d0)
    q_e = quat.quat_error(q_d, q_s)
    if q_e[3] < 0.0:
        q_e = -q_e  # double cover: pick the short rotation once, at start
    w_d, _ = eval_omega_d(0.0, cfg.omega_d_amplitude_deg)
    omega_e = np.asarray(cfg.omega_s0, dtype=float) - quat.rotation_matrix(q_e) @ w_d
    x = np.zeros(STATE_SIZE)
    x[QE] = q_e
    x[WE] = omega_e
    x[QD] = q_d
    x[F1] = omega_e
    return x


def closed_loop_field(cfg: ScenarioConfig, u):
    """Vector field of plant + target + observer with the torque ``u`` held fixed."""
    params, op, amp = cfg.spacecraft, cfg.observer, cfg.omega_d_amplitude_deg

    def f(t, x):
        target = _target(x, t, amp)
        q_e, w_e = x[QE], x[WE]
        d = eval_disturbance(cfg.disturbance, t)
        q_dot, w_dot = error_derivative(q_e, w_e, target, u, d, params)
        Omega_e = coupling_term(q_e, w_e, target, params)
        F1_dot, F2_dot = observer_derivative(x[F1], x[F2], w_e, u, Omega_e, params, op)
        out = np.empty(STATE_SIZE)
        out[QE] = q_dot
        out[WE] = w_dot
        out[QD] = target_derivative(target)
        out[F1] = F1_dot
        out[F2] = F2_dot
        return out

    return f


def controller_step(cfg: ScenarioConfig, rpf: RpfPoly, x, t):
    rho, rho_dot, rho_ddot = eval_rpf(rpf, t)
    target = _target(x, t, cfg.omega_d_amplitude_deg)
    d_hat = disturbance_estimate(x[F2], cfg.spacecraft)
    out = compute_control(x[QE], x[WE], target, rho, rho_dot, rho_ddot, d_hat, cfg.gains, cfg.spacecraft)
    return out, rho, d_hat, target


def _row(t, x, out, rho, d, d_hat, target):
    q_e = x[QE]
    omega_s = x[WE] + quat.rotation_matrix(q_e) @ target.omega_d
    return np.concatenate(
        [[t], q_e, rho, out.s, omega_s, x[WE], out.z2, out.u_sat, d, d_hat,
         [out.H, out.h, out.lambda_v, out.lambda_u]]
    )


def build_rpf(cfg: ScenarioConfig, x0) -> RpfPoly:
    return fit_rpf(x0[QE][:3] - np.asarray(cfg.rpf_offset, dtype=float), cfg.t_sd)


def _packed(cfg: ScenarioConfig):
    dm = cfg.disturbance
    dist = np.array(
        [
            float(dm.kind in ("periodic", "composite")),
            dm.periodic_scale,
            dm.omega_p,
            float(dm.kind in ("pulse", "composite")),
            *dm.pulse,
            dm.pulse_start,
            dm.pulse_duration,
        ]
    )
    op = cfg.observer
    obs = np.array([op.C1, op.C2, op.beta])
    return cfg.spacecraft.J, cfg.spacecraft.J_inv, float(cfg.omega_d_amplitude_deg), dist, obs


def run_scenario(cfg: ScenarioConfig, compiled: bool = True) -> SimulationTrace:
    """Simulate one scenario and return the control-rate trace.

    ``compiled=False`` integrates with the pure-numpy vector field instead of
    the numba kernel (same equations, much slower).
    """
    x = initial_state(cfg)
    rpf = build_rpf(cfg, x)
    rows = np.empty((cfg.n_rows, len(TRACE_COLUMNS)))
    h = cfg.dt_inner
    packed = _packed(cfg)
    for k in range(cfg.n_rows):
        t = k * cfg.dt_control
        try:
            out, rho, d_hat, target = controller_step(cfg, rpf, x, t)
        except SingularJacobian as exc:
            raise SingularJacobian(exc.qe0, t) from None
        rows[k] = _row(t, x, out, rho, eval_disturbance(cfg.disturbance, t), d_hat, target)
        if k == cfg.n_rows - 1:
            break
        if compiled:
            x, ok = _fast.hold_interval(x, t, h, cfg.substeps, out.u_sat, *packed)
            if not ok:
                raise NonFiniteState(t)
        else:
            f = closed_loop_field(cfg, out.u_sat)
            for j in range(cfg.substeps):
                x = rk4_step(f, x, t + j * h, h, QUAT_BLOCKS)
    if not np.all(np.isfinite(rows)):
        raise NonFiniteState()
    return SimulationTrace(data=rows, rpf=rpf, seed=cfg.seed)


MIN_SCALAR = 0.05


@dataclass
class MonteCarloCase:
    case_id: int
    seed: int
    q_s0: np.ndarray
    trace: SimulationTrace | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def case_seeds(master: int, n: int) -> list[int]:
    """Deterministic 64-bit per-case seeds spawned from ``master``."""
    children = np.random.SeedSequence(master).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def sample_attitude(seed: int, q_d0=quat.IDENTITY) -> np.ndarray:
    """Uniform random spacecraft attitude whose error to ``q_d0`` has ``q_e0 >= 0.05``."""
    rng = np.random.default_rng(seed)
    while True:
        q_e = quat.random_unit(rng)
        if abs(q_e[3]) >= MIN_SCALAR:
            break
    if q_e[3] < 0:
        q_e = -q_e
    return quat.multiply(quat.normalize(q_d0), q_e)


def _run_case(args):
    case_id, seed, cfg, compiled = args
    q_s0 = sample_attitude(seed, cfg.q_d0)
    case = MonteCarloCase(case_id=case_id, seed=seed, q_s0=q_s0)
    try:
        case.trace = run_scenario(replace(cfg, q_s0=tuple(q_s0), seed=seed, case_count=1), compiled)
    except PapError as exc:
        case.error = f"{type(exc).__name__}: {exc}"
    return case


def run_monte_carlo(cfg: ScenarioConfig, workers: int | None = None,
                    compiled: bool = True) -> list[MonteCarloCase]:
    """Run ``cfg.case_count`` cases with random initial attitudes.

    Failing cases are recorded with their error message instead of aborting.
    Results are returned in case order regardless of ``workers``.
    """
    jobs = [(i, s, cfg, compiled) for i, s in enumerate(case_seeds(cfg.seed, cfg.case_count))]
    if workers is None or workers <= 1:
        out = []
        for job in jobs:
            out.append(_run_case(job))
            log.debug("case %d done", job[0])
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_case, jobs))
