"""
Bellman operators, state distributions and the empirical contraction check
for the composed operator  V -> Phi l1(Phi l2(T V)).
"""

import logging

import numpy as np
import scipy.linalg

from ..envs.mdp import MdpModel, Policy
from ..utils.errors import InvalidInputError
from .projections import WeightedNorm, l1_projection, l2_projection

# Pairs closer than this in the rho-norm are skipped
ZERO_DISTANCE = 1e-12


def bellman_apply(m: MdpModel, policy: Policy, V) -> np.ndarray:
    """T^pi V = R^pi + gamma P^pi V."""
    V = np.asarray(V, dtype=np.float64)
    if V.shape != (m.n_states,):
        raise InvalidInputError(f"V must have {m.n_states} entries, got shape {V.shape}")
    return m.policy_reward(policy) + m.gamma * (m.policy_transition(policy) @ V)


def bellman_optimality_apply_q(m: MdpModel, Q) -> np.ndarray:
    """(T Q)(s, a) = R[a, s] + gamma sum_s' P[a, s, s'] max_a' Q(s', a'), shape (S, A)."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.shape != (m.n_states, m.n_actions):
        raise InvalidInputError(f"Q must have shape {(m.n_states, m.n_actions)}, got {Q.shape}")
    return (m.R + m.gamma * m.P @ Q.max(axis=1)).T


def stationary_distribution(P_pi) -> np.ndarray:
    """
    Stationary distribution rho of a row-stochastic matrix: rho P = rho, sum(rho) = 1.

    Solved as a least-squares system; tiny negative round-off is clipped.
    For reducible chains one stationary distribution is returned.
    """
    P_pi = np.asarray(P_pi, dtype=np.float64)
    n = P_pi.shape[0]
    if P_pi.shape != (n, n):
        raise InvalidInputError(f"P_pi must be square, got shape {P_pi.shape}")
    A = np.vstack([P_pi.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    rho, *_ = scipy.linalg.lstsq(A, b)
    rho = np.clip(rho, 0.0, None)
    return rho / rho.sum()


def empirical_distribution(states, n_states: int) -> np.ndarray:
    """State-visitation frequencies of a run."""
    states = np.asarray(states, dtype=np.int64)
    if states.size == 0:
        raise InvalidInputError("need at least one visited state")
    if states.min() < 0 or states.max() >= n_states:
        raise InvalidInputError(f"visited states must lie in [0, {n_states})")
    counts = np.bincount(states, minlength=n_states).astype(np.float64)
    return counts / counts.sum()


def weighted_norm(x, rho) -> float:
    return WeightedNorm(rho)(x)


def composed_operator(m: MdpModel, policy: Policy, phi, rho, beta: float):
    """
    Return K with K(V) = Phi l1_projection(Phi l2_projection(T^pi V), beta).

    beta is the projection's own l1 weight. The fixed point of K matches
    sparse mirror-descent TD run with sparsity b when beta = projection_beta(b).
    """
    phi = np.asarray(phi, dtype=np.float64)

    def K(V):
        projected = phi @ l2_projection(phi, rho, bellman_apply(m, policy, V))
        return phi @ l1_projection(phi, rho, projected, beta)

    return K


def contraction_check(
    m: MdpModel, policy: Policy, phi, rho, beta: float, n_pairs: int, seed: int, logger: logging.Logger | None = None
) -> float:
    """
    Empirical contraction factor of the composed operator in the rho-norm.

    Draws n_pairs standard-normal pairs (V1, V2) from a generator seeded with
    `seed` and returns max ||K V1 - K V2||_rho / ||V1 - V2||_rho. Pairs whose
    distance is below 1e-12 are skipped; with no usable pair the ratio is 0.

    The check passes when the ratio is at most gamma + 1e-6.
    """
    if n_pairs < 1:
        raise InvalidInputError(f"n_pairs must be >= 1, got {n_pairs}")
    norm = WeightedNorm(rho)
    K = composed_operator(m, policy, phi, norm.rho, beta)
    rng = np.random.default_rng(seed)
    max_ratio = 0.0
    skipped = 0
    for _ in range(n_pairs):
        V1 = rng.standard_normal(m.n_states)
        V2 = rng.standard_normal(m.n_states)
        distance = norm(V1 - V2)
        if distance < ZERO_DISTANCE:
            skipped += 1
            continue
        max_ratio = max(max_ratio, norm(K(V1) - K(V2)) / distance)
    if logger:
        logger.info(
            f"Contraction check: beta={beta}, gamma={m.gamma}, pairs={n_pairs}, skipped={skipped}, "
            f"max ratio={max_ratio:.6f}"
        )
    return max_ratio
