"""
Distance-generating functions and their link pairs.

A mirror map carries weights between the primal space (w) and the dual
space (theta = grad(w)). Three closed-form geometries are provided:

- EuclideanMap:  psi(w) = 1/2 ||w||_2^2, both links are the identity.
- PNormMap:      psi(w) = 1/2 ||w||_q^2 with conjugate 1/2 ||theta||_p^2,
                 1/p + 1/q = 1.
- NegEntropyMap: psi(w) = sum w_i log w_i - w_i on the positive orthant.

All maps are immutable and every method is a pure function of its inputs.
"""

import numpy as np

from ..utils.errors import DomainError, InvalidInputError

# Dual coordinates are clamped to this range before exponentiation.
ENTROPY_CLAMP = 500.0


def _as_finite_vector(x, name: str) -> np.ndarray:
    """Return x as a 1-D float64 array, raising InvalidInputError on bad input."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


class MirrorMap:
    """
    Base class for a distance-generating function psi.

    Subclasses implement `potential`, `grad` and `grad_conjugate`; the
    Bregman divergence is shared.

    Attributes:
        kind (str): Short identifier ("euclidean", "pnorm", "entropy").
        strong_convexity (float | None): Documented modulus sigma of psi, or
            None where no constant is asserted.
    """

    kind = "base"
    strong_convexity = None

    def potential(self, w) -> float:
        raise NotImplementedError

    def grad(self, w) -> np.ndarray:
        raise NotImplementedError

    def grad_conjugate(self, theta) -> np.ndarray:
        raise NotImplementedError

    def bregman(self, x, y) -> float:
        """
        Bregman divergence D(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>.

        Args:
            x: First point (domain of psi).
            y: Second point (domain of psi), same length as x.

        Returns:
            float: The divergence, nonnegative up to rounding.
        """
        x = _as_finite_vector(x, "x")
        y = _as_finite_vector(y, "y")
        if x.shape != y.shape:
            raise InvalidInputError(f"x and y differ in length: {x.size} != {y.size}")
        return float(self.potential(x) - self.potential(y) - np.dot(self.grad(y), x - y))

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()


class EuclideanMap(MirrorMap):
    """psi(w) = 1/2 ||w||_2^2. Mirror descent under this map is plain gradient descent."""

    kind = "euclidean"
    strong_convexity = 1.0

    def potential(self, w) -> float:
        w = _as_finite_vector(w, "w")
        return 0.5 * float(np.dot(w, w))

    def grad(self, w) -> np.ndarray:
        return _as_finite_vector(w, "w").copy()

    def grad_conjugate(self, theta) -> np.ndarray:
        return _as_finite_vector(theta, "theta").copy()

    def __repr__(self):
        return "EuclideanMap()"


class PNormMap(MirrorMap):
    """
    p-norm link pair.

    grad:           f_j(w)      = sign(w_j) |w_j|^(q-1) / ||w||_q^(q-2)
    grad_conjugate: f_j^-1(th)  = sign(th_j) |th_j|^(p-1) / ||th||_p^(p-2)

    Both links map 0 to 0 (the limit along rays). With p = 2 the map
    coincides with EuclideanMap.

    Args:
        p (float): Dual exponent, p > 1. The primal exponent q = p / (p - 1)
            is derived, never stored.
    """

    kind = "pnorm"
    # No numeric modulus is asserted for the p-norm potential.
    strong_convexity = None

    def __init__(self, p: float):
        p = float(p)
        if not np.isfinite(p) or p <= 1.0:
            raise InvalidInputError(f"p must be finite and > 1, got {p}")
        self._p = p

    @property
    def p(self) -> float:
        return self._p

    @property
    def q(self) -> float:
        return self._p / (self._p - 1.0)

    def potential(self, w) -> float:
        w = _as_finite_vector(w, "w")
        return 0.5 * float(np.linalg.norm(w, ord=self.q)) ** 2

    @staticmethod
    def _link(x: np.ndarray, r: float) -> np.ndarray:
        # The link is 1-homogeneous: evaluate on x / ||x||_r and rescale
        scale = float(np.max(np.abs(x))) if x.size else 0.0
        if scale == 0.0:
            return np.zeros_like(x)
        norm = scale * np.linalg.norm(x / scale, ord=r)
        u = x / norm
        return norm * np.sign(u) * np.abs(u) ** (r - 1.0)

    def grad(self, w) -> np.ndarray:
        return self._link(_as_finite_vector(w, "w"), self.q)

    def grad_conjugate(self, theta) -> np.ndarray:
        return self._link(_as_finite_vector(theta, "theta"), self._p)

    def _key(self):
        return (self._p,)

    def __repr__(self):
        return f"PNormMap(p={self._p:g})"


class NegEntropyMap(MirrorMap):
    """
    Negative entropy psi(w) = sum_i w_i log w_i - w_i on the positive orthant.

    grad(w) = log(w), grad_conjugate(theta) = exp(theta). The Bregman divergence
    is the generalised KL divergence and equals KL(x || y) for probability
    vectors.

    Dual coordinates are clamped to +-ENTROPY_CLAMP before exponentiation.
    When `total_mass` is set, grad_conjugate renormalises its output to sum to
    that constant (the usual rescaling that keeps exponentiated-gradient
    weights bounded).

    Args:
        total_mass (float | None): Target sum of the primal weights, or None
            for the unnormalised map.
    """

    kind = "entropy"
    # Modulus 1 w.r.t. the l1 norm on the probability simplex (Pinsker).
    strong_convexity = 1.0

    def __init__(self, total_mass: float | None = None):
        if total_mass is not None and not (np.isfinite(total_mass) and total_mass > 0):
            raise InvalidInputError(f"total_mass must be positive, got {total_mass}")
        self.total_mass = None if total_mass is None else float(total_mass)

    @staticmethod
    def _positive(w, name: str) -> np.ndarray:
        w = _as_finite_vector(w, name)
        if np.any(w <= 0.0):
            raise DomainError(f"negative entropy requires strictly positive {name}, min entry is {w.min():.3e}")
        return w

    def potential(self, w) -> float:
        w = self._positive(w, "w")
        return float(np.sum(w * np.log(w) - w))

    def grad(self, w) -> np.ndarray:
        return np.log(self._positive(w, "w"))

    def grad_conjugate(self, theta) -> np.ndarray:
        theta = np.clip(_as_finite_vector(theta, "theta"), -ENTROPY_CLAMP, ENTROPY_CLAMP)
        if self.total_mass is None:
            return np.exp(theta)
        # Shift by the max before exponentiating; the normalisation cancels it.
        u = np.exp(theta - theta.max())
        return self.total_mass * u / u.sum()

    def _key(self):
        return (self.total_mass,)

    def __repr__(self):
        return f"NegEntropyMap(total_mass={self.total_mass})"


def make_mirror_map(kind: str, p: float | None = None, total_mass: float | None = None) -> MirrorMap:
    """
    Build a mirror map from its identifier.

    Args:
        kind (str): "euclidean", "pnorm" or "entropy".
        p (float, optional): Dual exponent, required for "pnorm".
        total_mass (float, optional): Renormalisation constant for "entropy".

    Raises:
        InvalidInputError: Unknown kind or missing p.
    """
    if kind == "euclidean":
        return EuclideanMap()
    if kind == "pnorm":
        if p is None:
            raise InvalidInputError("pnorm map needs p")
        return PNormMap(p)
    if kind == "entropy":
        return NegEntropyMap(total_mass)
    raise InvalidInputError(f"unknown mirror map kind: {kind!r}")
