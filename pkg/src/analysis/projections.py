"""
rho-weighted projections onto span(Phi).

l2_projection is weighted least squares; l1_projection solves the weighted
LASSO  min_w ||y - Phi w||_rho^2 + beta ||w||_1  by cyclic coordinate descent
on the Gram matrix.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..utils.errors import ConvergenceError, InvalidInputError, RankDeficiencyError

L1_MAX_SWEEPS = 100_000
L1_TOL = 1e-10
KKT_TOL = 1e-8


@dataclass(frozen=True)
class WeightedNorm:
    """
    ||x||_rho = sqrt(sum_i rho_i x_i^2) for a probability vector rho.

    Raises:
        InvalidInputError: If rho has negative entries or does not sum to 1 within 1e-12.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.float64)
        if rho.ndim != 1 or rho.size == 0:
            raise InvalidInputError(f"rho must be a non-empty vector, got shape {rho.shape}")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise InvalidInputError("rho must have finite nonnegative entries")
        if abs(rho.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"rho must sum to 1, sums to {rho.sum():.15g}")
        object.__setattr__(self, "rho", rho)

    def inner(self, x, y) -> float:
        return float(np.sum(self.rho * np.asarray(x) * np.asarray(y)))

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(np.sqrt(np.sum(self.rho * x * x)))


def _check_problem(phi, rho, y) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    phi = np.asarray(phi, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if phi.ndim != 2:
        raise InvalidInputError(f"Phi must be 2-D, got shape {phi.shape}")
    rho = WeightedNorm(rho).rho
    if rho.size != phi.shape[0] or y.shape != (phi.shape[0],):
        raise InvalidInputError(
            f"shapes do not match: Phi {phi.shape}, rho {rho.shape}, y {y.shape}"
        )
    return phi, rho, y


def l2_projection(phi, rho, y) -> np.ndarray:
    """
    Weighted least squares w = argmin ||y - Phi w||_rho^2.

    Solved through the SVD of diag(sqrt(rho)) Phi.

    Raises:
        RankDeficiencyError: If Phi is rank deficient under the rho weighting;
            the error carries a unit vector of the null space.
    """
    phi, rho, y = _check_problem(phi, rho, y)
    sqrt_rho = np.sqrt(rho)
    A = sqrt_rho[:, None] * phi
    b = sqrt_rho * y
    U, s, Vt = scipy.linalg.svd(A, full_matrices=False)
    tol = (s[0] if s.size else 0.0) * max(A.shape) * np.finfo(np.float64).eps
    if s.size < phi.shape[1] or s[-1] <= tol:
        _, _, Vt_full = scipy.linalg.svd(A)
        null = Vt_full[-1]
        raise RankDeficiencyError(
            f"Phi is rank deficient under rho (smallest singular value {s[-1] if s.size else 0.0:.3e})", null
        )
    return Vt.T @ ((U.T @ b) / s)


def projection_beta(learner_beta: float) -> float:
    """
    l1 weight of the projection whose fixed point sparse mirror-descent TD reaches.

    The learner soft-thresholds its dual by alpha beta, so its fixed point
    satisfies Phi^T diag(rho) (T Phi w - Phi w) = beta sign(w) on the support.
    l1_projection's optimality conditions hold at half its l1 weight, so a
    learner run with `learner_beta` matches l1_projection at 2 learner_beta.
    """
    if learner_beta < 0 or not np.isfinite(learner_beta):
        raise InvalidInputError(f"beta must be finite and >= 0, got {learner_beta}")
    return 2.0 * learner_beta


def lasso_kkt_residual(gram: np.ndarray, corr: np.ndarray, w: np.ndarray, beta: float) -> float:
    """
    Largest violation of the LASSO optimality conditions.

    With c = Phi^T diag(rho) (y - Phi w): c_j = beta/2 sign(w_j) where w_j != 0
    and |c_j| <= beta/2 where w_j = 0.
    """
    c = corr - gram @ w
    half = beta / 2.0
    violation = np.where(
        w > 0, np.abs(c - half), np.where(w < 0, np.abs(c + half), np.maximum(np.abs(c) - half, 0.0))
    )
    return float(violation.max()) if violation.size else 0.0


def l1_projection(phi, rho, y, beta: float, max_sweeps: int = L1_MAX_SWEEPS, tol: float = L1_TOL, w0=None) -> np.ndarray:
    """
    l1-regularised projection: w = argmin ||y - Phi w||_rho^2 + beta ||w||_1.

    Cyclic coordinate descent with covariance updates. Columns with zero
    weighted norm stay at 0.

    Args:
        phi: |S| x d feature matrix.
        rho: State distribution.
        y: Target vector.
        beta (float): l1 weight, >= 0.
        max_sweeps (int): Iteration cap over full sweeps.
        tol (float): Convergence when the largest coordinate change of a sweep is <= tol.
        w0: Optional warm start.

    Raises:
        InvalidInputError: If beta < 0.
        ConvergenceError: If the cap is reached or the result fails the
            optimality check; carries the KKT residual.
    """
    phi, rho, y = _check_problem(phi, rho, y)
    if beta < 0 or not np.isfinite(beta):
        raise InvalidInputError(f"beta must be finite and >= 0, got {beta}")
    weighted = rho[:, None] * phi
    gram = phi.T @ weighted
    corr = weighted.T @ y
    diag = np.diag(gram).copy()
    half = beta / 2.0
    d = phi.shape[1]

    w = np.zeros(d) if w0 is None else np.array(w0, dtype=np.float64)
    active = diag > 0
    w[~active] = 0.0
    for _ in range(max_sweeps):
        max_change = 0.0
        for j in np.flatnonzero(active):
            c_j = corr[j] - gram[j] @ w + diag[j] * w[j]
            new = np.sign(c_j) * max(abs(c_j) - half, 0.0) / diag[j]
            change = abs(new - w[j])
            if change > max_change:
                max_change = change
            w[j] = new
        if max_change <= tol:
            break
    else:
        raise ConvergenceError(
            f"coordinate descent did not converge within {max_sweeps} sweeps",
            lasso_kkt_residual(gram, corr, w, beta),
        )

    residual = lasso_kkt_residual(gram[np.ix_(active, active)], corr[active], w[active], beta)
    # The last sweep may still move c_j by up to tol times a row sum of the Gram matrix
    allowed = KKT_TOL + tol * float(np.abs(gram).sum(axis=1).max(initial=0.0))
    if residual > allowed:
        raise ConvergenceError(f"LASSO optimality residual {residual:.3e} exceeds tolerance", residual)
    return w
