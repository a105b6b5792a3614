"""
Learner state, hyperparameters, the adaptive diagonal scaler and the
snapshot text format.
"""

from dataclasses import dataclass, field

import numpy as np

from ..config import format_value, read_key_values
from ..utils.errors import DivergenceError, InvalidInputError
from .schedules import AlphaSchedule, PSchedule


@dataclass(frozen=True)
class Hyperparameters:
    """
    Hyperparameters shared by every learner.

    Attributes:
        alpha (AlphaSchedule): Step-size schedule alpha_t.
        lam (float): Trace decay lambda in [0, 1].
        gamma (float): Discount factor.
        beta (float): Sparsity parameter (l1 weight), >= 0.
        p (PSchedule): p-norm link schedule.
        epsilon (float): Exploration rate for action-value learners.
        trace_mode (str): "standard" (e <- gamma lam e + phi) or "literal"
            (e <- e + lam gamma phi).
        divergence_limit (float): Runs abort once max |w| exceeds this.
    """

    alpha: AlphaSchedule = field(default_factory=AlphaSchedule)
    lam: float = 0.0
    gamma: float = 0.9
    beta: float = 0.0
    p: PSchedule = field(default_factory=PSchedule)
    epsilon: float = 0.1
    trace_mode: str = "standard"
    divergence_limit: float = 1e8

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidInputError(f"lambda must be in [0, 1], got {self.lam}")
        if not 0.0 <= self.gamma < 1.0:
            raise InvalidInputError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.beta < 0:
            raise InvalidInputError(f"beta must be >= 0, got {self.beta}")
        if self.trace_mode not in ("standard", "literal"):
            raise InvalidInputError(f"unknown trace mode {self.trace_mode!r}")

    def to_dict(self) -> dict:
        return {
            "alpha_kind": self.alpha.kind,
            "alpha0": self.alpha.alpha0,
            "alpha_exponent": self.alpha.exponent,
            "lam": self.lam,
            "gamma": self.gamma,
            "beta": self.beta,
            "p_kind": self.p.kind,
            "p_horizon": self.p.horizon,
            "p0": 0.0 if self.p.p0 is None else self.p.p0,
            "epsilon": self.epsilon,
            "trace_mode": self.trace_mode,
            "divergence_limit": self.divergence_limit,
        }

    @classmethod
    def from_dict(cls, values: dict) -> "Hyperparameters":
        return cls(
            alpha=AlphaSchedule(values["alpha_kind"], float(values["alpha0"]), float(values["alpha_exponent"])),
            lam=float(values["lam"]),
            gamma=float(values["gamma"]),
            beta=float(values["beta"]),
            p=PSchedule(values["p_kind"], int(values["p_horizon"]), float(values["p0"]) or None),
            epsilon=float(values["epsilon"]),
            trace_mode=values["trace_mode"],
            divergence_limit=float(values["divergence_limit"]),
        )


@dataclass
class LearnerState:
    """
    Mutable state of one learner run.

    Attributes:
        w (np.ndarray): Primal weights.
        e (np.ndarray): Eligibility trace, reset to 0 at every episode start.
        hyper (Hyperparameters): Hyperparameters.
        theta (np.ndarray | None): Dual weights (mirror learners only). For the
            negative-entropy link theta has 2d entries (EG+- doubling).
        t (int): Number of steps taken.
    """

    w: np.ndarray
    e: np.ndarray
    hyper: Hyperparameters
    theta: np.ndarray | None = None
    t: int = 0

    @classmethod
    def zeros(cls, d: int, hyper: Hyperparameters, dual_size: int | None = None) -> "LearnerState":
        """
        w = 0, e = 0; theta = 0 of length `dual_size` when given.

        theta = 0 equals grad(0) for the Euclidean and p-norm links, and gives
        w+ = w- (so w = 0) for the doubled entropy link.
        """
        theta = None if dual_size is None else np.zeros(dual_size)
        return cls(w=np.zeros(d), e=np.zeros(d), hyper=hyper, theta=theta)

    @property
    def d(self) -> int:
        return self.w.size

    @property
    def alpha(self) -> float:
        return self.hyper.alpha(self.t)

    def start_episode(self) -> None:
        self.e = np.zeros_like(self.e)

    def check_divergence(self) -> None:
        """
        Raises:
            DivergenceError: If w has non-finite entries or max |w| exceeds the limit.
        """
        if not np.all(np.isfinite(self.w)):
            raise DivergenceError(self.t, float("inf"))
        norm = float(np.max(np.abs(self.w))) if self.w.size else 0.0
        if norm > self.hyper.divergence_limit:
            raise DivergenceError(self.t, norm)

    def to_text(self) -> str:
        """Snapshot in the `key = value` header format followed by vector rows."""
        lines = ["# learner snapshot", f"t = {self.t}", f"d = {self.d}"]
        lines += [f"{key} = {format_value(value)}" for key, value in self.hyper.to_dict().items()]
        lines.append("vectors = 1")
        lines.append("w " + " ".join(repr(float(x)) for x in self.w))
        lines.append("e " + " ".join(repr(float(x)) for x in self.e))
        if self.theta is not None:
            lines.append("theta " + " ".join(repr(float(x)) for x in self.theta))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LearnerState":
        all_lines = text.splitlines()
        try:
            split = next(i for i, line in enumerate(all_lines) if line.strip().startswith("vectors"))
        except StopIteration:
            raise InvalidInputError("snapshot has no `vectors` line")
        header = {key: value for _, key, value in read_key_values("\n".join(all_lines[:split + 1]))}
        vectors = {}
        for line in all_lines[split + 1:]:
            parts = line.split()
            if parts:
                vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
        return cls(
            w=vectors["w"],
            e=vectors["e"],
            hyper=Hyperparameters.from_dict(header),
            theta=vectors.get("theta"),
            t=int(header["t"]),
        )


@dataclass
class AdaptiveScaler:
    """
    Diagonal Mahalanobis scaling for composite mirror descent.

    G accumulates squared per-coordinate signals: the current features
    ("features" mode) or the TD update xi = delta * e ("gradient" mode).
    H = sqrt(G) + eta.
    """

    G: np.ndarray
    eta: float = 1e-6
    mode: str = "features"

    def __post_init__(self):
        if self.eta <= 0:
            raise InvalidInputError(f"H floor eta must be > 0, got {self.eta}")
        if self.mode not in ("features", "gradient"):
            raise InvalidInputError(f"unknown covariance mode {self.mode!r}")

    @classmethod
    def zeros(cls, d: int, eta: float = 1e-6, mode: str = "features") -> "AdaptiveScaler":
        return cls(np.zeros(d), eta, mode)

    def update(self, phi_s: np.ndarray, xi: np.ndarray) -> None:
        signal = phi_s if self.mode == "features" else xi
        self.G = self.G + signal * signal

    @property
    def H(self) -> np.ndarray:
        return np.sqrt(self.G) + self.eta
