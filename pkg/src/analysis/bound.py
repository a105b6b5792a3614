"""
Evaluator for the finite-sample error bound of sparse mirror-descent TD.

    ||V - Phi w_N|| <= 1/(1 - gamma) * ( ||V - Pi V|| + f(Pi V, beta)
                                         + (M - 1) P0 + ||w*||_1^2 M / (alpha N) )

with M = 2 / (2 - 4 alpha (p - 1) e), e = d^(p/2),
P0 = mean over the run's samples of (Pi V)(s_i)^2 and Phi w* = Pi_l1 Pi V.
Every norm is the rho-weighted l2 norm. beta is the learner's sparsity
parameter; Pi_l1 uses the matching l1 weight projection_beta(beta).
"""

from dataclasses import asdict, dataclass

import numpy as np

from ..envs.mdp import MdpModel, Policy
from ..envs.solvers import policy_evaluation_exact
from ..utils.errors import InvalidInputError
from .projections import WeightedNorm, l1_projection, l2_projection, projection_beta

BOUND_COLUMNS = (
    "lhs",
    "approximation_error",
    "f_unsquared",
    "f_squared",
    "solver_term",
    "regret_term",
    "rhs",
    "rhs_squared_f",
    "M",
    "e",
    "P0",
    "w_star_l1",
    "passed",
)


@dataclass(frozen=True)
class BoundReport:
    """
    Left side, every right-side term and the resulting right side.

    f(y, beta) = ||y - Pi_l1 y|| is reported both squared and unsquared;
    `rhs` and `passed` use the unsquared value and `rhs_squared_f` the
    squared one.
    """

    lhs: float
    approximation_error: float
    f_unsquared: float
    f_squared: float
    solver_term: float
    regret_term: float
    rhs: float
    rhs_squared_f: float
    M: float
    e: float
    P0: float
    w_star_l1: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def terms(self) -> tuple[float, float, float, float]:
        return (self.approximation_error, self.f_unsquared, self.solver_term, self.regret_term)

    def to_row(self) -> dict:
        row = asdict(self)
        row["passed"] = self.passed
        return row


def max_admissible_alpha(p: float, d: int) -> float:
    """Largest step size keeping M positive: alpha < 1 / (2 (p - 1) d^(p/2))."""
    return 1.0 / (2.0 * (p - 1.0) * float(d) ** (p / 2.0))


def error_bound(
    m: MdpModel,
    policy: Policy,
    phi,
    rho,
    beta: float,
    alpha: float,
    p: float,
    N: int,
    w_N,
    visited_states,
) -> BoundReport:
    """
    Evaluate the bound for weights w_N reached after N sparse mirror-descent steps.

    Args:
        m (MdpModel): The MDP; V is its exact policy value.
        policy (Policy): Evaluated policy.
        phi: |S| x d feature matrix.
        rho: State distribution used by every norm.
        beta (float): Sparsity parameter of the run.
        alpha (float): Step size of the run.
        p (float): Dual exponent of the run's p-norm link, > 1.
        N (int): Number of steps.
        w_N: Final weights.
        visited_states: The N sampled states s_i, used for P0.

    Raises:
        InvalidInputError: If alpha is not admissible (M <= 0); the message names
            the largest admissible step size.
    """
    phi = np.asarray(phi, dtype=np.float64)
    w_N = np.asarray(w_N, dtype=np.float64)
    visited = np.asarray(visited_states, dtype=np.int64)
    d = phi.shape[1]
    if p <= 1.0:
        raise InvalidInputError(f"p must be > 1, got {p}")
    if N < 1 or visited.size == 0:
        raise InvalidInputError("need N >= 1 and at least one visited state")
    if w_N.shape != (d,):
        raise InvalidInputError(f"w_N must have {d} entries, got shape {w_N.shape}")

    e = float(d) ** (p / 2.0)
    denominator = 2.0 - 4.0 * alpha * (p - 1.0) * e
    if alpha <= 0 or denominator <= 0:
        raise InvalidInputError(
            f"step size {alpha} is not admissible; alpha must be below {max_admissible_alpha(p, d):.6e}"
        )
    M = 2.0 / denominator

    norm = WeightedNorm(rho)
    V = policy_evaluation_exact(m, policy)
    PiV = phi @ l2_projection(phi, norm.rho, V)
    w_star = l1_projection(phi, norm.rho, PiV, projection_beta(beta))

    lhs = norm(V - phi @ w_N)
    approximation_error = norm(V - PiV)
    f_unsquared = norm(PiV - phi @ w_star)
    f_squared = f_unsquared**2
    P0 = float(np.mean(PiV[visited] ** 2))
    solver_term = (M - 1.0) * P0
    w_star_l1 = float(np.sum(np.abs(w_star)))
    regret_term = w_star_l1**2 * M / (alpha * N)

    scale = 1.0 / (1.0 - m.gamma)
    return BoundReport(
        lhs=lhs,
        approximation_error=approximation_error,
        f_unsquared=f_unsquared,
        f_squared=f_squared,
        solver_term=solver_term,
        regret_term=regret_term,
        rhs=scale * (approximation_error + f_unsquared + solver_term + regret_term),
        rhs_squared_f=scale * (approximation_error + f_squared + solver_term + regret_term),
        M=M,
        e=e,
        P0=P0,
        w_star_l1=w_star_l1,
    )
