"""
Exact dynamic-programming solvers used as verification oracles.
"""

import numpy as np
import scipy.linalg

from ..utils.errors import InvalidInputError
from .mdp import MdpModel, Policy

RESIDUAL_TOL = 1e-10


def policy_evaluation_exact(m: MdpModel, policy: Policy) -> np.ndarray:
    """
    Solve V = R^pi + gamma P^pi V exactly.

    Returns:
        np.ndarray: V^pi, one value per state.

    Raises:
        RuntimeError: If the linear system is singular or the residual check fails.
    """
    P_pi = m.policy_transition(policy)
    R_pi = m.policy_reward(policy)
    A = np.eye(m.n_states) - m.gamma * P_pi
    try:
        V = scipy.linalg.solve(A, R_pi)
    except scipy.linalg.LinAlgError as e:
        raise RuntimeError(f"policy evaluation system is singular: {e}")

    residual = np.max(np.abs(V - (R_pi + m.gamma * P_pi @ V)))
    if residual > RESIDUAL_TOL * max(1.0, np.max(np.abs(V))):
        raise RuntimeError(f"policy evaluation residual {residual:.3e} exceeds tolerance")
    return V


def policy_evaluation_iterative(m: MdpModel, policy: Policy, sweeps: int = 10_000) -> np.ndarray:
    """Fixed-point iteration V <- R^pi + gamma P^pi V from V = 0."""
    P_pi = m.policy_transition(policy)
    R_pi = m.policy_reward(policy)
    V = np.zeros(m.n_states)
    for _ in range(sweeps):
        V = R_pi + m.gamma * P_pi @ V
    return V


def q_values_exact(m: MdpModel, V: np.ndarray) -> np.ndarray:
    """Q(s, a) = R[a, s] + gamma sum_s' P[a, s, s'] V(s'), shape (S, A)."""
    V = np.asarray(V, dtype=np.float64)
    if V.shape != (m.n_states,):
        raise InvalidInputError(f"V must have {m.n_states} entries, got shape {V.shape}")
    return (m.R + m.gamma * m.P @ V).T


def greedy_policy(m: MdpModel, V: np.ndarray) -> Policy:
    """Greedy deterministic policy w.r.t. V; ties go to the lowest action index."""
    return Policy.deterministic(np.argmax(q_values_exact(m, V), axis=1), m.n_actions)


def value_iteration_exact(m: MdpModel, tol: float = 1e-10, max_iter: int = 1_000_000) -> tuple[np.ndarray, Policy]:
    """
    Value iteration until the Bellman optimality residual is at most `tol`.

    Returns:
        tuple: (V*, greedy policy pi*).

    Raises:
        InvalidInputError: If tol <= 0.
        RuntimeError: If max_iter sweeps are not enough.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be > 0, got {tol}")
    V = np.zeros(m.n_states)
    for _ in range(max_iter):
        TV = q_values_exact(m, V).max(axis=1)
        if np.max(np.abs(TV - V)) <= tol:
            return V, greedy_policy(m, V)
        V = TV
    raise RuntimeError(f"value iteration did not reach tol={tol} within {max_iter} sweeps")
