import numpy as np

from ..utils.errors import InvalidInputError


def soft_threshold(w, tau):
    """
    Entry-wise proximal operator of tau * ||.||_1.

    Parameters:
    w = vector to shrink.
    tau = nonnegative threshold, a scalar or one threshold per entry.

    Returns: sign(w_i) * max(0, |w_i| - tau_i) for every entry.
    """
    tau_arr = np.asarray(tau, dtype=np.float64)
    if np.any(tau_arr < 0) or not np.all(np.isfinite(tau_arr)):
        raise InvalidInputError(f"threshold must be finite and >= 0, got {tau}")
    w = np.asarray(w, dtype=np.float64)
    return np.sign(w) * np.maximum(np.abs(w) - tau_arr, 0.0)
