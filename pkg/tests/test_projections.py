"""
Tests for the rho-weighted l2 and l1 projections.
"""

import numpy as np
import pytest
from scipy.optimize import minimize

from src.analysis.projections import WeightedNorm, l1_projection, l2_projection, lasso_kkt_residual, projection_beta
from src.geometry.prox import soft_threshold
from src.utils.errors import ConvergenceError, InvalidInputError, RankDeficiencyError


@pytest.fixture
def problem():
    """Random 20-state, 5-feature instance with a Dirichlet state distribution."""
    rng = np.random.default_rng(0)
    phi = rng.normal(size=(20, 5))
    rho = rng.dirichlet(np.ones(20))
    y = rng.normal(size=20)
    return phi, rho, y


def lasso_objective(phi, rho, y, w, beta):
    """
    Weighted LASSO objective ||y - Phi w||_rho^2 + beta ||w||_1.

    Parameters:
    phi (np.ndarray): Feature matrix.
    rho (np.ndarray): State distribution.
    y (np.ndarray): Target.
    w (np.ndarray): Weights.
    beta (float): l1 weight.

    Returns:
    float: Objective value.
    """
    r = y - phi @ w
    return float(np.sum(rho * r * r) + beta * np.sum(np.abs(w)))


def test_weighted_norm():
    """
    Verify the rho-norm, its inner product and rejection of invalid distributions.
    """
    norm = WeightedNorm(np.array([0.25, 0.75]))
    assert norm([2.0, 0.0]) == pytest.approx(1.0)
    assert norm.inner([1.0, 1.0], [2.0, 4.0]) == pytest.approx(3.5)
    with pytest.raises(InvalidInputError):
        WeightedNorm(np.array([0.5, 0.6]))
    with pytest.raises(InvalidInputError):
        WeightedNorm(np.array([1.5, -0.5]))


def test_l2_projection_residual_is_orthogonal(problem):
    """
    Verify the residual y - Phi w is rho-orthogonal to every column within 1e-10.
    """
    phi, rho, y = problem
    w = l2_projection(phi, rho, y)
    assert np.max(np.abs(phi.T @ (rho * (y - phi @ w)))) <= 1e-10


def test_l2_projection_rank_deficiency():
    """
    Verify a duplicated column raises RankDeficiencyError carrying a null-space direction.
    """
    rng = np.random.default_rng(1)
    col = rng.normal(size=(6, 1))
    phi = np.hstack([col, col, rng.normal(size=(6, 1))])
    rho = np.full(6, 1.0 / 6)
    with pytest.raises(RankDeficiencyError) as info:
        l2_projection(phi, rho, rng.normal(size=6))
    null = info.value.null_direction
    assert np.linalg.norm(null) == pytest.approx(1.0)
    assert np.max(np.abs(phi @ null)) <= 1e-10


def test_l1_projection_without_penalty_is_l2(problem):
    """
    Verify beta = 0 reproduces the least-squares projection.
    """
    phi, rho, y = problem
    assert np.allclose(l1_projection(phi, rho, y, 0.0), l2_projection(phi, rho, y), atol=1e-6)


def test_l1_projection_orthonormal_closed_form():
    """
    Verify with orthonormal columns and uniform rho the solution is soft_threshold(Phi^T y, n beta / 2).
    """
    rng = np.random.default_rng(2)
    phi, _ = np.linalg.qr(rng.normal(size=(8, 3)))
    rho = np.full(8, 1.0 / 8)
    y = rng.normal(size=8)
    beta = 0.05
    expected = soft_threshold(phi.T @ y, 8 * beta / 2.0)
    assert np.allclose(l1_projection(phi, rho, y, beta), expected, atol=1e-10)


def test_l1_projection_satisfies_kkt(problem):
    """
    Verify the solution meets the LASSO optimality conditions to 1e-8.
    """
    phi, rho, y = problem
    beta = 0.05
    w = l1_projection(phi, rho, y, beta)
    weighted = rho[:, None] * phi
    assert lasso_kkt_residual(phi.T @ weighted, weighted.T @ y, w, beta) <= 1e-8


def test_l1_projection_large_beta_is_zero(problem):
    """
    Verify beta above twice every correlation gives w = 0.
    """
    phi, rho, y = problem
    beta = 2.0 * np.max(np.abs(phi.T @ (rho * y))) + 1.0
    assert np.array_equal(l1_projection(phi, rho, y, beta), np.zeros(5))


def test_l1_projection_matches_bound_constrained_solver():
    """
    Verify on a 3-feature instance that no bound-constrained quasi-Newton solution
    of the split problem w = u - v beats the coordinate-descent objective, and
    the gap is below 1e-4.
    """
    rng = np.random.default_rng(3)
    phi = rng.normal(size=(10, 3))
    rho = rng.dirichlet(np.ones(10))
    y = rng.normal(size=10)
    beta = 0.1

    def split_objective(z):
        w = z[:3] - z[3:]
        r = y - phi @ w
        g = -2.0 * phi.T @ (rho * r)
        value = np.sum(rho * r * r) + beta * np.sum(z)
        return value, np.concatenate([g + beta, -g + beta])

    result = minimize(
        split_objective, np.zeros(6), jac=True, method="L-BFGS-B",
        bounds=[(0.0, None)] * 6, options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10_000},
    )
    reference = lasso_objective(phi, rho, y, result.x[:3] - result.x[3:], beta)
    ours = lasso_objective(phi, rho, y, l1_projection(phi, rho, y, beta), beta)
    assert ours <= reference + 1e-9
    assert reference - ours <= 1e-4


def test_l1_projection_is_non_expansive(problem):
    """
    Verify ||Phi l1(y1) - Phi l1(y2)||_rho <= ||y1 - y2||_rho + 1e-8 on 100 random pairs.
    """
    phi, rho, _ = problem
    norm = WeightedNorm(rho)
    rng = np.random.default_rng(4)
    for _ in range(100):
        y1, y2 = rng.normal(size=20), rng.normal(size=20)
        w1 = l1_projection(phi, rho, y1, 0.1)
        w2 = l1_projection(phi, rho, y2, 0.1)
        assert norm(phi @ (w1 - w2)) <= norm(y1 - y2) + 1e-8


def test_l2_projection_is_idempotent(problem):
    """
    Verify re-projecting Phi w returns w within 1e-8 (unpenalised projection).
    """
    phi, rho, y = problem
    w = l1_projection(phi, rho, y, 0.0)
    assert np.max(np.abs(l1_projection(phi, rho, phi @ w, 0.0) - w)) <= 1e-8


@pytest.mark.parametrize("beta", [0.01, 0.1, 0.5])
def test_l1_projection_is_stable_from_its_own_output(problem, beta):
    """
    Verify restarting the solver from its own solution returns that solution within 1e-8.
    """
    phi, rho, y = problem
    w = l1_projection(phi, rho, y, beta)
    assert np.max(np.abs(l1_projection(phi, rho, y, beta, w0=w) - w)) <= 1e-8


def test_l1_projection_shrinks_its_own_output_again():
    """
    Verify that with beta > 0 re-projecting Phi w shrinks w once more: with
    orthonormal columns the result is soft_threshold(w, beta / 2).
    """
    phi = np.eye(4)[:, :3] * 2.0
    rho = np.full(4, 0.25)
    y = np.array([3.0, -1.0, 0.2, 5.0])
    beta = 0.4
    w = l1_projection(phi, rho, y, beta)
    again = l1_projection(phi, rho, phi @ w, beta)
    assert np.allclose(again, soft_threshold(w, beta / 2.0), atol=1e-10)
    assert np.sum(np.abs(again)) < np.sum(np.abs(w))


def test_projection_beta_doubles_the_learner_weight():
    """
    Verify the learner-to-projection l1 weight is 2 beta and rejects negative beta.
    """
    assert projection_beta(0.0) == 0.0
    assert projection_beta(0.01) == pytest.approx(0.02)
    with pytest.raises(InvalidInputError):
        projection_beta(-0.01)


def test_l1_projection_errors(problem):
    """
    Verify negative beta, mismatched shapes and an exhausted sweep budget are reported.
    """
    phi, rho, y = problem
    with pytest.raises(InvalidInputError):
        l1_projection(phi, rho, y, -0.1)
    with pytest.raises(InvalidInputError):
        l1_projection(phi, rho, y[:10], 0.1)
    with pytest.raises(ConvergenceError) as info:
        l1_projection(phi, rho, y, 0.01, max_sweeps=1)
    assert info.value.residual > 0.0
