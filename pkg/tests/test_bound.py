"""
Tests for the finite-sample error bound evaluator.
"""

import numpy as np
import pytest

from src.analysis.bound import BOUND_COLUMNS, error_bound, max_admissible_alpha
from src.analysis.operators import stationary_distribution
from src.envs.mdp import Policy
from src.envs.solvers import policy_evaluation_exact
from src.envs.worlds import chain_mdp
from src.utils.errors import InvalidInputError


@pytest.fixture
def chain_setup():
    m = chain_mdp(5, 0.9)
    policy = Policy.uniform(5, 2)
    rho = stationary_distribution(m.policy_transition(policy))
    return m, policy, rho


def test_max_admissible_alpha():
    """
    Verify alpha_max = 1 / (2 (p - 1) d^(p/2)).
    """
    assert max_admissible_alpha(2.0, 4) == pytest.approx(1.0 / 8.0)
    assert max_admissible_alpha(3.0, 4) == pytest.approx(1.0 / 32.0)


def test_bound_at_exact_solution(chain_setup):
    """
    Verify with tabular features and w_N = V^pi the left side and the approximation
    error vanish, the constants follow their definitions and the bound holds.
    """
    m, policy, rho = chain_setup
    phi = np.eye(5)
    v = policy_evaluation_exact(m, policy)
    alpha = 0.5 * max_admissible_alpha(2.0, 5)
    report = error_bound(m, policy, phi, rho, 0.0, alpha, 2.0, 1000, v, [0, 1, 2, 3, 4])
    assert report.lhs == pytest.approx(0.0, abs=1e-10)
    assert report.approximation_error == pytest.approx(0.0, abs=1e-10)
    assert report.f_unsquared == pytest.approx(0.0, abs=1e-6)
    assert report.e == pytest.approx(5.0)
    assert report.M == pytest.approx(2.0 / (2.0 - 4.0 * alpha * 5.0))
    assert report.P0 == pytest.approx(np.mean(v**2))
    assert report.passed
    assert set(report.to_row()) == set(BOUND_COLUMNS)


def test_bound_squared_and_unsquared_f(chain_setup):
    """
    Verify f is reported squared and unsquared and only the matching right side changes.
    """
    m, policy, rho = chain_setup
    phi = np.eye(5)[:, :3]
    alpha = 0.5 * max_admissible_alpha(2.0, 3)
    report = error_bound(m, policy, phi, rho, 0.05, alpha, 2.0, 500, np.zeros(3), [4, 4, 3])
    assert report.f_squared == pytest.approx(report.f_unsquared**2)
    scale = 1.0 / (1.0 - m.gamma)
    assert report.rhs - report.rhs_squared_f == pytest.approx(scale * (report.f_unsquared - report.f_squared))
    assert report.terms[1] == report.f_unsquared


def test_bound_rejects_inadmissible_alpha(chain_setup):
    """
    Verify a step size at or above the admissible limit raises and names the limit.
    """
    m, policy, rho = chain_setup
    limit = max_admissible_alpha(2.0, 5)
    with pytest.raises(InvalidInputError, match="must be below"):
        error_bound(m, policy, np.eye(5), rho, 0.0, 1.01 * limit, 2.0, 10, np.zeros(5), [0])
    with pytest.raises(InvalidInputError):
        error_bound(m, policy, np.eye(5), rho, 0.0, 0.01, 2.0, 10, np.zeros(4), [0])
