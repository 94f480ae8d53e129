"""Exception hierarchy for the blowdown package."""


class BlowdownError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(BlowdownError, ValueError):
    """A physical or numerical parameter violates its admissible range."""


class StateValidityError(BlowdownError, ValueError):
    """A dynamic state or operation input is non-finite or out of range."""


class ScenarioError(BlowdownError, ValueError):
    """Base class for scenario-document problems."""


class ScenarioSyntaxError(ScenarioError):
    """The scenario document is not well-formed structured text."""


class UnknownKeyError(ScenarioError):
    """The scenario document contains a key outside the schema (strict mode)."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown scenario key: {path!r}")


class InvariantViolation(ScenarioError):
    """A scenario value violates a declared invariant."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class IntegrationError(BlowdownError, RuntimeError):
    """The integrator failed; carries the failure time and state snapshot."""

    def __init__(self, message: str, t: float | None = None, state=None):
        self.t = t
        self.state = state
        if t is not None:
            message = f"{message} (at t = {t:.6g} s)"
        super().__init__(message)
