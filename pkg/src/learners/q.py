"""
Action-value (Q) variants of the TD updates.

Features are state-action vectors phi(s, a). The bootstrap target uses the
greedy value max_a' <phi(s', a'), w>, taken over the rows of
`phi_next_actions` (one row per action); None marks a terminal next state.
Traces are accumulated naively (never cut on exploratory actions).
"""

import numpy as np

from ..geometry.mirror_maps import MirrorMap
from ..utils.errors import InvalidInputError
from .state import AdaptiveScaler, LearnerState
from .td import _check_features, _composite_delta_step, _mirror_delta_step, _td_delta_step, td_error


def greedy_action(q_values) -> int:
    """Index of the largest action value; ties go to the lowest index."""
    q_values = np.asarray(q_values, dtype=np.float64)
    if q_values.ndim != 1 or q_values.size == 0:
        raise InvalidInputError(f"q_values must be a non-empty vector, got shape {q_values.shape}")
    return int(np.argmax(q_values))


def epsilon_greedy(q_values, epsilon: float, rng: np.random.Generator) -> int:
    """
    With probability epsilon a uniformly random action, otherwise greedy_action.

    Raises:
        InvalidInputError: If epsilon is outside [0, 1].
    """
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidInputError(f"epsilon must be in [0, 1], got {epsilon}")
    q_values = np.asarray(q_values, dtype=np.float64)
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(q_values.size))
    return greedy_action(q_values)


def greedy_value(w: np.ndarray, phi_next_actions) -> float:
    """max_a <phi(s', a), w>, or 0 for a terminal next state."""
    if phi_next_actions is None:
        return 0.0
    rows = np.asarray(phi_next_actions, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != w.size:
        raise InvalidInputError(f"phi_next_actions must have shape (A, {w.size}), got {rows.shape}")
    return float(np.max(rows @ w))


def _q_error(state: LearnerState, phi_sa, phi_next_actions, r: float) -> tuple[np.ndarray, float]:
    phi_sa = _check_features(state, phi_sa, "phi_sa")
    delta = td_error(state.w, phi_sa, r, state.hyper.gamma, greedy_value(state.w, phi_next_actions))
    return phi_sa, delta


def q_learning_step(state: LearnerState, phi_sa, phi_next_actions, r: float) -> LearnerState:
    """Linear Q(lambda): e <- trace_update(e, phi_sa), w <- w + alpha delta e."""
    phi_sa, delta = _q_error(state, phi_sa, phi_next_actions, r)
    return _td_delta_step(state, phi_sa, delta, use_trace=True)


def mirror_q_step(state: LearnerState, mirror_map: MirrorMap, phi_sa, phi_next_actions, r: float) -> LearnerState:
    phi_sa, delta = _q_error(state, phi_sa, phi_next_actions, r)
    return _mirror_delta_step(state, mirror_map, phi_sa, delta, threshold=None)


def sparse_mirror_q_step(state: LearnerState, mirror_map: MirrorMap, phi_sa, phi_next_actions, r: float) -> LearnerState:
    phi_sa, delta = _q_error(state, phi_sa, phi_next_actions, r)
    return _mirror_delta_step(state, mirror_map, phi_sa, delta, threshold=state.alpha * state.hyper.beta)


def composite_q_step(state: LearnerState, scaler: AdaptiveScaler, phi_sa, phi_next_actions, r: float) -> LearnerState:
    phi_sa, delta = _q_error(state, phi_sa, phi_next_actions, r)
    return _composite_delta_step(state, scaler, phi_sa, delta)
