"""Attitude control with tube constraints around reference performance functions."""

from .analysis import (
    PerformanceReport,
    TheoryBounds,
    attraction_bounds,
    derived_constants,
    overshoot,
    pap_monitor,
    performance_report,
    settling_time,
)
from .config import parse_config
from .controller import ControllerGains, ControlOutputs, compute_control, sontag_lambda
from .dynamics import DisturbanceModel, SpacecraftParams, TargetState
from .errors import (
    EmptyTrace,
    InfeasibleConstants,
    InvalidHorizon,
    NonFiniteState,
    ParseError,
    PapError,
    SingularJacobian,
    UnitRangeError,
    UnknownKey,
)
from .observer import ObserverParams
from .rpf import RpfPoly, eval_rpf, fit_rpf
from .sim import ScenarioConfig, SimulationTrace, run_monte_carlo, run_scenario

__version__ = "0.1.0"
