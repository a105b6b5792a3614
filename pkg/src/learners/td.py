"""
Temporal-difference updates for linear value functions.

Every step function takes a LearnerState, mutates it in place and returns it.
The TD error is always computed with the weights held before the step. A
`phi_next` of None marks a terminal transition (bootstrap value 0).

    td0_step              w <- w + alpha delta phi(s)
    td_step               TD(lambda) with an eligibility trace
    mirror_td_step        dual step theta = grad(w) + alpha delta e, w = grad*(theta)
    sparse_mirror_td_step as mirror_td_step with the dual soft-thresholded by alpha beta
    composite_md_step     diagonal AdaGrad-style scaling with per-coordinate shrinkage
"""

import numpy as np

from ..geometry.mirror_maps import MirrorMap, NegEntropyMap
from ..geometry.prox import soft_threshold
from ..utils.errors import InvalidInputError
from .state import AdaptiveScaler, LearnerState


def _check_features(state: LearnerState, phi, name: str) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape != state.w.shape:
        raise InvalidInputError(f"{name} has shape {phi.shape}, weights have shape {state.w.shape}")
    return phi


def td_error(w: np.ndarray, phi_s: np.ndarray, r: float, gamma: float, next_value: float) -> float:
    """delta = r + gamma * next_value - <phi_s, w>."""
    return float(r + gamma * next_value - np.dot(phi_s, w))


def trace_update(e: np.ndarray, phi_s: np.ndarray, gamma: float, lam: float, mode: str = "standard") -> np.ndarray:
    """
    Eligibility trace update.

    standard: e' = gamma * lam * e + phi_s (accumulating trace)
    literal:  e' = e + lam * gamma * phi_s (never decays)

    Raises:
        InvalidInputError: If lam is outside [0, 1] or the mode is unknown.
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"lambda must be in [0, 1], got {lam}")
    if mode == "standard":
        return gamma * lam * e + phi_s
    if mode == "literal":
        return e + lam * gamma * phi_s
    raise InvalidInputError(f"unknown trace mode {mode!r}")


def _next_value(state: LearnerState, phi_next) -> float:
    if phi_next is None:
        return 0.0
    return float(np.dot(_check_features(state, phi_next, "phi_next"), state.w))


def _advance(state: LearnerState) -> LearnerState:
    state.t += 1
    state.check_divergence()
    return state


def td0_step(state: LearnerState, phi_s, phi_next, r: float) -> LearnerState:
    """
    One TD(0) step, w <- w + alpha_t delta phi(s). The trace is left untouched.

    Args:
        state (LearnerState): Learner state, mutated in place.
        phi_s: Features of the current state.
        phi_next: Features of the next state, or None if it is terminal.
        r (float): Observed reward.

    Returns:
        LearnerState: The same state object.

    Raises:
        InvalidInputError: On a feature/weight dimension mismatch.
        DivergenceError: If the weights leave the divergence limit.
    """
    phi_s = _check_features(state, phi_s, "phi_s")
    delta = td_error(state.w, phi_s, r, state.hyper.gamma, _next_value(state, phi_next))
    return _td_delta_step(state, phi_s, delta, use_trace=False)


def td_step(state: LearnerState, phi_s, phi_next, r: float) -> LearnerState:
    """TD(lambda): e <- trace_update(e, phi_s), w <- w + alpha_t delta e."""
    phi_s = _check_features(state, phi_s, "phi_s")
    delta = td_error(state.w, phi_s, r, state.hyper.gamma, _next_value(state, phi_next))
    return _td_delta_step(state, phi_s, delta, use_trace=True)


def _td_delta_step(state: LearnerState, phi_s: np.ndarray, delta: float, use_trace: bool) -> LearnerState:
    alpha = state.alpha
    if use_trace:
        h = state.hyper
        state.e = trace_update(state.e, phi_s, h.gamma, h.lam, h.trace_mode)
        direction = state.e
    else:
        direction = phi_s
    state.w = state.w + (alpha * delta) * direction
    return _advance(state)


def mirror_td_step(state: LearnerState, mirror_map: MirrorMap, phi_s, phi_next, r: float) -> LearnerState:
    """
    Adaptive mirror-descent TD(lambda).

    e <- trace_update(e, phi_s)
    theta <- grad(w) + alpha_t delta e
    w <- grad_conjugate(theta)

    With the negative-entropy map the weights may take any sign, so the
    learner runs the doubled EG+- form: theta has 2d entries, the dual step
    is [alpha delta e, -alpha delta e] and w = u[:d] - u[d:] with
    u = grad_conjugate(theta).
    """
    phi_s = _check_features(state, phi_s, "phi_s")
    delta = td_error(state.w, phi_s, r, state.hyper.gamma, _next_value(state, phi_next))
    return _mirror_delta_step(state, mirror_map, phi_s, delta, threshold=None)


def sparse_mirror_td_step(state: LearnerState, mirror_map: MirrorMap, phi_s, phi_next, r: float) -> LearnerState:
    """mirror_td_step with the dual vector truncated by soft_threshold(theta, alpha_t beta)."""
    phi_s = _check_features(state, phi_s, "phi_s")
    delta = td_error(state.w, phi_s, r, state.hyper.gamma, _next_value(state, phi_next))
    return _mirror_delta_step(state, mirror_map, phi_s, delta, threshold=state.alpha * state.hyper.beta)


def _mirror_delta_step(
    state: LearnerState, mirror_map: MirrorMap, phi_s: np.ndarray, delta: float, threshold: float | None
) -> LearnerState:
    h = state.hyper
    alpha = state.alpha
    state.e = trace_update(state.e, phi_s, h.gamma, h.lam, h.trace_mode)
    step = (alpha * delta) * state.e

    if isinstance(mirror_map, NegEntropyMap):
        d = state.d
        if state.theta is None or state.theta.size != 2 * d:
            raise InvalidInputError(f"entropy learner needs a dual vector of length {2 * d}")
        theta = state.theta + np.concatenate([step, -step])
        if threshold is not None:
            theta = soft_threshold(theta, threshold)
        u = mirror_map.grad_conjugate(theta)
        state.theta = theta
        state.w = u[:d] - u[d:]
    else:
        theta = mirror_map.grad(state.w) + step
        if threshold is not None:
            theta = soft_threshold(theta, threshold)
        state.theta = theta
        state.w = mirror_map.grad_conjugate(theta)
    return _advance(state)


def composite_md_step(state: LearnerState, scaler: AdaptiveScaler, phi_s, phi_next, r: float) -> LearnerState:
    """
    Composite mirror-descent TD(lambda) with diagonal scaling.

    delta and e as in mirror_td_step, xi = delta e, G accumulates squared
    features (or xi, in gradient mode), H = sqrt(G) + eta and

        w_i <- sign(z_i) max(0, |z_i| - alpha beta / H_i),  z_i = w_i + alpha xi_i / H_i

    so that beta = 0, H = 1 is plain TD(lambda).
    """
    phi_s = _check_features(state, phi_s, "phi_s")
    if scaler.G.shape != state.w.shape:
        raise InvalidInputError(f"scaler has shape {scaler.G.shape}, weights have shape {state.w.shape}")
    delta = td_error(state.w, phi_s, r, state.hyper.gamma, _next_value(state, phi_next))
    return _composite_delta_step(state, scaler, phi_s, delta)


def _composite_delta_step(state: LearnerState, scaler: AdaptiveScaler, phi_s: np.ndarray, delta: float) -> LearnerState:
    h = state.hyper
    alpha = state.alpha
    state.e = trace_update(state.e, phi_s, h.gamma, h.lam, h.trace_mode)
    xi = delta * state.e
    scaler.update(phi_s, xi)
    H = scaler.H
    z = state.w + alpha * xi / H
    state.w = soft_threshold(z, alpha * h.beta / H)
    return _advance(state)
