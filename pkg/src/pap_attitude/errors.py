"""Exception types shared across the package."""


class PapError(Exception):
    """Base class for all package errors."""


class SingularJacobian(PapError):
    """Raised when the kinematic Jacobian F_e cannot be inverted (|q_e0| too small)."""

    def __init__(self, qe0: float, t: float | None = None):
        self.qe0 = qe0
        self.t = t
        where = "" if t is None else f" at t={t:.6g} s"
        super().__init__(f"kinematic Jacobian is singular{where} (q_e0={qe0:.3e})")


class InvalidHorizon(PapError, ValueError):
    pass


class NonFiniteState(PapError):
    def __init__(self, t: float | None = None):
        self.t = t
        where = "" if t is None else f" at t={t:.6g} s"
        super().__init__(f"state became non-finite{where}")


class EmptyTrace(PapError, ValueError):
    pass


class InfeasibleConstants(PapError, ValueError):
    pass


class ConfigError(PapError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, lineno: int, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}")


class UnknownKey(ConfigError):
    def __init__(self, key: str, lineno: int | None = None):
        self.key = key
        self.lineno = lineno
        where = "" if lineno is None else f"line {lineno}: "
        super().__init__(f"{where}unknown key {key!r}")


class UnitRangeError(ConfigError):
    pass
