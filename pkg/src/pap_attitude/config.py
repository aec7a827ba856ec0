"""Flat ``section.key = value`` configuration files and the built-in scenarios.

Angles and rates are given in degrees (deg, deg/s) in files and converted on load.
"""

from __future__ import annotations

from dataclasses import fields, replace

import numpy as np

from .controller import ControllerGains
from .dynamics import DEG, DisturbanceModel, SpacecraftParams
from .errors import ParseError, UnitRangeError, UnknownKey
from .observer import ObserverParams
from .sim import ScenarioConfig


def _floats(n):
    def conv(text):
        vals = [float(v) for v in text.replace(",", " ").split()]
        if len(vals) != n:
            raise ValueError(f"expected {n} numbers, got {len(vals)}")
        return tuple(vals)
    return conv


def _deg3(text):
    return tuple(v * DEG for v in _floats(3)(text))


# key -> (target object, field, converter, unit)
_TOP = {
    "sim.t_final": ("cfg", "t_final", float, "s"),
    "sim.dt_control": ("cfg", "dt_control", float, "s"),
    "sim.dt_inner": ("cfg", "dt_inner", float, "s"),
    "sim.seed": ("cfg", "seed", int, "-"),
    "sim.case_count": ("cfg", "case_count", int, "-"),
    "initial.q_s": ("cfg", "q_s0", _floats(4), "x y z w"),
    "initial.omega_s": ("cfg", "omega_s0", _deg3, "deg/s"),
    "target.q_d": ("cfg", "q_d0", _floats(4), "x y z w"),
    "target.omega_d_amplitude": ("cfg", "omega_d_amplitude_deg", float, "deg/s"),
    "rpf.offset": ("cfg", "rpf_offset", _floats(3), "-"),
    "rpf.t_sd": ("cfg", "t_sd", float, "s"),
    "spacecraft.J": ("spacecraft", "J", lambda s: np.reshape(_floats(9)(s), (3, 3)), "kg m^2, row-major"),
    "spacecraft.u_max": ("spacecraft", "u_max", float, "N m"),
    "disturbance.kind": ("disturbance", "kind", str.strip, "periodic|pulse|composite|none"),
    "disturbance.omega_p": ("disturbance", "omega_p", float, "rad/s"),
    "disturbance.periodic_scale": ("disturbance", "periodic_scale", float, "N m"),
    "disturbance.pulse": ("disturbance", "pulse", _floats(3), "N m"),
    "disturbance.pulse_start": ("disturbance", "pulse_start", float, "s"),
    "disturbance.pulse_duration": ("disturbance", "pulse_duration", float, "s"),
}
KEYS = dict(_TOP)
KEYS.update({f"gains.{f.name}": ("gains", f.name, float, "-") for f in fields(ControllerGains)})
KEYS.update({f"observer.{f.name}": ("observer", f.name, float, "-") for f in fields(ObserverParams)})

_PARTS = ("gains", "observer", "spacecraft", "disturbance")


def normal_config() -> ScenarioConfig:
    return ScenarioConfig()


def robust_config() -> ScenarioConfig:
    return ScenarioConfig(
        omega_s0=(5.0 * DEG,) * 3,
        disturbance=DisturbanceModel(kind="composite", pulse=(0.5, 0.5, 0.5),
                                     pulse_start=100.0, pulse_duration=0.5),
    )


def montecarlo_config(case_count: int = 100) -> ScenarioConfig:
    return ScenarioConfig(t_final=100.0, rpf_offset=(0.0, 0.0, 0.0), case_count=case_count)


BUILTIN = {"normal": normal_config, "robust": robust_config, "montecarlo": montecarlo_config}


def parse_lines(text: str):
    """Yield ``(lineno, key, value)`` for each assignment line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'section.key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key or not value:
            raise ParseError(lineno, "empty key or value")
        yield lineno, key, value


def apply_overrides(base: ScenarioConfig, items) -> ScenarioConfig:
    """Apply ``(lineno, key, value)`` items on top of ``base``."""
    updates = {name: {} for name in ("cfg",) + _PARTS}
    for lineno, key, value in items:
        if key not in KEYS:
            raise UnknownKey(key, lineno)
        target, name, conv, _ = KEYS[key]
        try:
            updates[target][name] = conv(value)
        except ValueError as exc:
            raise ParseError(lineno or 0, f"{key}: {exc}") from None
    try:
        parts = {p: replace(getattr(base, p), **updates[p]) for p in _PARTS if updates[p]}
        return replace(base, **updates["cfg"], **parts)
    except ValueError as exc:
        raise UnitRangeError(str(exc)) from None


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse a config document; missing keys keep the values of ``base`` (default: nominal)."""
    return apply_overrides(base or normal_config(), list(parse_lines(text)))


def parse_assignment(item: str):
    """Split a ``key=value`` command-line override."""
    if "=" not in item:
        raise ParseError(0, f"override {item!r} is not key=value")
    key, value = (p.strip() for p in item.split("=", 1))
    return 0, key, value


def describe_keys() -> str:
    return "\n".join(f"{k:32s} {v[3]}" for k, v in KEYS.items())
