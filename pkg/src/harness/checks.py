"""
Verification suites run by `check --suite NAME`.

geometry:    link round trips, soft threshold against a grid search, Bregman = KL
contraction: empirical contraction factor of Phi l1(Phi l2(T V)) on random MDPs
bound:       the sparse mirror-descent TD error bound on a 10-state chain
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..analysis.bound import error_bound, max_admissible_alpha
from ..analysis.operators import contraction_check, stationary_distribution
from ..basis.pvf import pvf_basis
from ..envs.mdp import Policy
from ..envs.rollout import rollout
from ..envs.worlds import chain_mdp, random_mdp
from ..geometry.mirror_maps import EuclideanMap, NegEntropyMap, PNormMap
from ..geometry.prox import soft_threshold
from ..learners.schedules import AlphaSchedule, PSchedule
from ..learners.state import Hyperparameters, LearnerState
from ..learners.td import sparse_mirror_td_step
from ..utils.errors import InvalidInputError

CHECK_COLUMNS = ("suite", "name", "value", "threshold", "passed")


@dataclass(frozen=True)
class CheckResult:
    """One verification: PASS when value <= threshold."""

    suite: str
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.threshold)

    def to_row(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
        }


def roundtrip_error(mirror_map, vectors: np.ndarray) -> float:
    """max over rows of ||grad*(grad(w)) - w||_inf / max(1, ||w||_inf)."""
    worst = 0.0
    for w in vectors:
        back = mirror_map.grad_conjugate(mirror_map.grad(w))
        worst = max(worst, float(np.max(np.abs(back - w))) / max(1.0, float(np.max(np.abs(w)))))
    return worst


def soft_threshold_grid_error(values: np.ndarray, taus: np.ndarray, resolution: float = 1e-5) -> float:
    """
    Largest distance between soft_threshold(v, tau) and the grid argmin of
    1/2 (x - v)^2 + tau |x|.
    """
    worst = 0.0
    for v, tau in zip(values, taus):
        lo = min(0.0, v - tau) - 10 * resolution
        hi = max(0.0, v + tau) + 10 * resolution
        grid = np.append(np.arange(lo, hi, resolution), 0.0)
        objective = 0.5 * (grid - v) ** 2 + tau * np.abs(grid)
        oracle = grid[np.argmin(objective)]
        worst = max(worst, abs(float(soft_threshold(np.array([v]), tau)[0]) - oracle))
    return worst


def geometry_suite(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for d in (2, 10, 100):
        for p in sorted({2.0, 2.5, float(max(2, math.ceil(math.log(d))))}):
            vectors = rng.uniform(-1.0, 1.0, size=(1000, d))
            results.append(
                CheckResult("geometry", f"roundtrip_d{d}_p{p:g}", roundtrip_error(PNormMap(p), vectors), 1e-8)
            )

    values = rng.uniform(-1.0, 1.0, 1000)
    taus = rng.uniform(0.0, 0.5, 1000)
    results.append(CheckResult("geometry", "soft_threshold_grid", soft_threshold_grid_error(values, taus), 2e-5))

    entropy = NegEntropyMap()
    worst = 0.0
    for _ in range(100):
        x = rng.dirichlet(np.ones(10))
        y = rng.dirichlet(np.ones(10))
        worst = max(worst, abs(entropy.bregman(x, y) - float(np.sum(x * np.log(x / y)))))
    results.append(CheckResult("geometry", "bregman_equals_kl", worst, 1e-10))

    w = rng.uniform(-1.0, 1.0, 10)
    diff = max(
        float(np.max(np.abs(EuclideanMap().grad(w) - PNormMap(2.0).grad(w)))),
        float(np.max(np.abs(EuclideanMap().grad_conjugate(w) - PNormMap(2.0).grad_conjugate(w)))),
    )
    results.append(CheckResult("geometry", "euclidean_equals_pnorm2", diff, 1e-14))
    return results


def contraction_suite(seed: int = 0, logger: logging.Logger | None = None) -> list[CheckResult]:
    results = []
    for gamma in (0.8, 0.9):
        m = random_mdp(20, 2, gamma, seed)
        policy = Policy.uniform(m.n_states, m.n_actions)
        rho = stationary_distribution(m.policy_transition(policy))
        phi = pvf_basis(m.adjacency(), 10).matrix()
        for beta in (0.0, 0.01):
            ratio = contraction_check(m, policy, phi, rho, beta, 100, seed, logger)
            results.append(CheckResult("contraction", f"gamma{gamma:g}_beta{beta:g}", ratio, gamma + 1e-6))
    return results


def bound_suite(seed: int = 0, n_steps: int = 10_000) -> list[CheckResult]:
    """Sparse mirror-descent TD (p = 2, half the largest admissible step) on a 10-state chain."""
    m = chain_mdp(10, 0.9)
    policy = Policy.uniform(m.n_states, m.n_actions)
    phi = pvf_basis(m.adjacency(), 5).matrix()
    rho = stationary_distribution(m.policy_transition(policy))
    p, beta = 2.0, 0.01
    alpha = 0.5 * max_admissible_alpha(p, phi.shape[1])

    hyper = Hyperparameters(alpha=AlphaSchedule("constant", alpha), gamma=m.gamma, beta=beta, p=PSchedule("fixed", p0=p))
    state = LearnerState.zeros(phi.shape[1], hyper, dual_size=phi.shape[1])
    link = PNormMap(p)
    trace = rollout(m, policy, n_steps, seed)
    for tr in trace:
        sparse_mirror_td_step(state, link, phi[tr.s], None if tr.terminal else phi[tr.s_next], tr.r)

    report = error_bound(m, policy, phi, rho, beta, alpha, p, len(trace), state.w, [tr.s for tr in trace])
    # rhs uses the unsquared f term; report.rhs_squared_f is informational
    return [CheckResult("bound", "lhs_minus_rhs", report.lhs - report.rhs, 0.0)]


SUITES = ("geometry", "contraction", "bound")


def run_suite(name: str, seed: int = 0, logger: logging.Logger | None = None) -> list[CheckResult]:
    """
    Raises:
        InvalidInputError: Unknown suite name.
    """
    if name == "geometry":
        results = geometry_suite(seed)
    elif name == "contraction":
        results = contraction_suite(seed, logger)
    elif name == "bound":
        results = bound_suite(seed)
    else:
        raise InvalidInputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if logger:
        for r in results:
            logger.info(f"{r.suite}/{r.name}: value={r.value:.6e} threshold={r.threshold:.6e} {'PASS' if r.passed else 'FAIL'}")
    return results
