"""
Step-size and p-norm schedules.
"""

import math
from dataclasses import dataclass

from ..utils.errors import InvalidInputError


def alpha_schedule(t: int, kind: str, alpha0: float, exponent: float = 1.0) -> float:
    """
    Step size at step t.

    constant:      alpha0
    robbins_monro: alpha0 / (1 + t)^exponent, exponent in (0.5, 1]

    Raises:
        InvalidInputError: Unknown kind or exponent out of range.
    """
    if kind == "constant":
        return alpha0
    if kind == "robbins_monro":
        if not 0.5 < exponent <= 1.0:
            raise InvalidInputError(f"Robbins-Monro exponent must be in (0.5, 1], got {exponent}")
        return alpha0 / (1.0 + t) ** exponent
    raise InvalidInputError(f"unknown step-size schedule {kind!r}")


def initial_p(d: int) -> float:
    """p(0) = max(2, ln d)."""
    if d < 1:
        raise InvalidInputError(f"d must be >= 1, got {d}")
    return max(2.0, math.log(d))


def p_schedule(t: int, d: int, kind: str = "decay", horizon: int = 10_000, p0: float | None = None) -> float:
    """
    Dual exponent of the p-norm link at step t.

    Starts at p0 (default max(2, ln d)). `fixed` keeps p0 forever; `decay`
    moves linearly down to 2 and stays at 2 from `horizon` on.
    """
    start = initial_p(d) if p0 is None else float(p0)
    if kind == "fixed":
        return start
    if kind == "decay":
        if t >= horizon:
            return 2.0
        return max(2.0, start - (start - 2.0) * t / horizon)
    raise InvalidInputError(f"unknown p schedule {kind!r}")


@dataclass(frozen=True)
class AlphaSchedule:
    """Step-size schedule as a value object; call with t to get alpha_t."""

    kind: str = "constant"
    alpha0: float = 0.1
    exponent: float = 0.6

    def __post_init__(self):
        if self.alpha0 <= 0:
            raise InvalidInputError(f"alpha0 must be > 0, got {self.alpha0}")
        # Validates kind and exponent once
        alpha_schedule(0, self.kind, self.alpha0, self.exponent)

    def __call__(self, t: int) -> float:
        return alpha_schedule(t, self.kind, self.alpha0, self.exponent)


@dataclass(frozen=True)
class PSchedule:
    """p-norm schedule; p0 = None means max(2, ln d)."""

    kind: str = "decay"
    horizon: int = 10_000
    p0: float | None = None

    def __post_init__(self):
        if self.kind not in ("fixed", "decay"):
            raise InvalidInputError(f"unknown p schedule {self.kind!r}")
        if self.horizon < 1:
            raise InvalidInputError(f"horizon must be >= 1, got {self.horizon}")
        if self.p0 is not None and self.p0 <= 1.0:
            raise InvalidInputError(f"p0 must be > 1, got {self.p0}")
        if self.kind == "decay" and self.p0 is not None and self.p0 < 2.0:
            raise InvalidInputError(f"a decaying schedule ends at p = 2 and needs p0 >= 2, got {self.p0}")

    def __call__(self, t: int, d: int) -> float:
        return p_schedule(t, d, self.kind, self.horizon, self.p0)
