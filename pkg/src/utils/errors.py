"""Exception types shared by the toolkit.

Value-like problems subclass ValueError and runtime failures subclass
RuntimeError, so callers can catch either the precise type or the builtin.
"""


class InvalidInputError(ValueError):
    """An argument is malformed: wrong shape, non-finite entries, negative threshold."""


class DomainError(ValueError):
    """A point lies outside the domain of a distance-generating function."""


class InvalidStateError(ValueError):
    """A state index or state vector is not valid for the basis or environment."""


class ConstructionError(ValueError):
    """An environment or basis cannot be built from the given description."""


class ConfigError(ValueError):
    """A configuration file is invalid. `line` is the 1-based offending line, if any."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RankDeficiencyError(ValueError):
    """The weighted feature matrix is not full column rank."""

    def __init__(self, message: str, null_direction=None):
        self.null_direction = null_direction
        super().__init__(message)


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (final residual {residual:.3e})")


class DivergenceError(RuntimeError):
    """Learner weights became non-finite or exceeded the divergence limit."""

    def __init__(self, step: int, weight_norm: float):
        self.step = step
        self.weight_norm = weight_norm
        super().__init__(f"weights diverged at step {step}: max |w| = {weight_norm:.3e}")
