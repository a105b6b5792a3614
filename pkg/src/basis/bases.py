"""
Feature constructions mapping states to d-vectors.

Discrete bases (tabular, matrix-backed PVF and noise bases) take an integer
state index. Continuous bases (Fourier, polynomial, RBF) take a real state
vector and rescale it to [0, 1]^dim using per-dimension bounds.

Every basis is immutable after construction and `evaluate` is pure.
"""

import itertools

import numpy as np

from ..utils.errors import InvalidInputError, InvalidStateError
from ..utils.logger import get_logger

logger = get_logger("basis")


class FeatureBasis:
    """
    Base class for a feature map phi: state -> R^d.

    Attributes:
        kind (str): Identifier used by the text format.
        d (int): Number of features.
        n_states (int | None): Size of the state space for discrete bases,
            None for continuous ones.
    """

    kind = "base"

    def __init__(self, d: int, n_states: int | None = None):
        if d < 1:
            raise InvalidInputError(f"feature count must be >= 1, got {d}")
        self.d = int(d)
        self.n_states = n_states

    def evaluate(self, state) -> np.ndarray:
        raise NotImplementedError

    def matrix(self) -> np.ndarray:
        """
        Stack phi(s) for every state of a discrete basis into the |S| x d matrix Phi.

        Raises:
            InvalidInputError: If the basis has no finite state space.
        """
        if self.n_states is None:
            raise InvalidInputError(f"{self.kind} basis has no finite state space")
        return np.vstack([self.evaluate(s) for s in range(self.n_states)])

    def params(self) -> dict:
        """Kind-specific parameters written to the text header."""
        return {}

    def _check_index(self, state) -> int:
        if isinstance(state, (bool, np.bool_)) or not isinstance(state, (int, np.integer)):
            raise InvalidStateError(f"{self.kind} basis expects an integer state, got {state!r}")
        if not 0 <= state < self.n_states:
            raise InvalidStateError(f"state {state} out of range [0, {self.n_states})")
        return int(state)


class TabularBasis(FeatureBasis):
    """One-hot indicator features, d = n_states."""

    kind = "tabular"

    def __init__(self, n_states: int):
        if n_states < 1:
            raise InvalidInputError(f"n_states must be >= 1, got {n_states}")
        super().__init__(n_states, n_states)

    def evaluate(self, state) -> np.ndarray:
        phi = np.zeros(self.d)
        phi[self._check_index(state)] = 1.0
        return phi

    def matrix(self) -> np.ndarray:
        return np.eye(self.d)

    def params(self) -> dict:
        return {"n_states": self.n_states}


class MatrixBasis(FeatureBasis):
    """
    Discrete basis backed by an explicit |S| x d matrix.

    Args:
        phi (np.ndarray): Feature matrix, one row per state.
    """

    kind = "matrix"

    def __init__(self, phi):
        phi = np.array(phi, dtype=np.float64)
        if phi.ndim != 2 or phi.shape[0] < 1:
            raise InvalidInputError(f"feature matrix must be 2-D and non-empty, got shape {phi.shape}")
        if not np.all(np.isfinite(phi)):
            raise InvalidInputError("feature matrix has non-finite entries")
        super().__init__(phi.shape[1], phi.shape[0])
        phi.setflags(write=False)
        self._phi = phi

    def evaluate(self, state) -> np.ndarray:
        return self._phi[self._check_index(state)].copy()

    def matrix(self) -> np.ndarray:
        return self._phi.copy()


class NoisyBasis(MatrixBasis):
    """
    Base features followed by n_noise frozen standard-normal columns.

    The noise is drawn once at construction from numpy's default generator
    seeded with `seed`, one value per (state, feature).
    """

    kind = "noisy"

    def __init__(self, base: FeatureBasis, n_noise: int, seed: int):
        if base.n_states is None:
            raise InvalidInputError("noise augmentation needs a basis over a finite state space")
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal((base.n_states, n_noise))
        super().__init__(np.hstack([base.matrix(), noise]))
        self.base = base
        self.n_noise = int(n_noise)
        self.seed = int(seed)

    def params(self) -> dict:
        return {"base_kind": self.base.kind, "base_d": self.base.d, "n_noise": self.n_noise, "seed": self.seed}


def multi_indices(order: int, dim: int) -> np.ndarray:
    """Full grid {0..order}^dim as an integer array of shape ((order+1)^dim, dim)."""
    return np.array(list(itertools.product(range(order + 1), repeat=dim)), dtype=np.int64).reshape(-1, dim)


class BoundedBasis(FeatureBasis):
    """
    Continuous basis whose input is rescaled to [0, 1]^dim using per-dimension bounds.

    States outside the bounds are clamped onto them.
    """

    def __init__(self, d: int, bounds):
        bounds = np.asarray(bounds, dtype=np.float64)
        if bounds.ndim != 2 or bounds.shape[1] != 2 or bounds.shape[0] < 1:
            raise InvalidInputError(f"bounds must be a list of [lo, hi] pairs, got shape {bounds.shape}")
        if np.any(bounds[:, 0] >= bounds[:, 1]):
            raise InvalidInputError("bounds must satisfy lo < hi in every dimension")
        super().__init__(d)
        bounds.setflags(write=False)
        self.bounds = bounds

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    def out_of_bounds(self, state) -> bool:
        s = self._check_vector(state)
        return bool(np.any(s < self.bounds[:, 0]) or np.any(s > self.bounds[:, 1]))

    def normalize(self, state) -> np.ndarray:
        """Clamp `state` to the bounds and rescale it to [0, 1]^dim."""
        s = self._check_vector(state)
        lo, hi = self.bounds[:, 0], self.bounds[:, 1]
        clamped = np.clip(s, lo, hi)
        if np.any(clamped != s):
            logger.debug("state %s clamped to bounds %s", s, self.bounds.tolist())
        return (clamped - lo) / (hi - lo)

    def _check_vector(self, state) -> np.ndarray:
        s = np.asarray(state, dtype=np.float64).reshape(-1)
        if s.size != self.dim or not np.all(np.isfinite(s)):
            raise InvalidStateError(f"expected a finite state of dimension {self.dim}, got {state!r}")
        return s

    def params(self) -> dict:
        return {"bounds": self.bounds.tolist()}


class FourierBasis(BoundedBasis):
    """
    Fourier cosine basis phi_c(s) = cos(pi c . s_bar) over the full multi-index
    grid c in {0..order}^dim, with s_bar the state rescaled to [0, 1]^dim.
    """

    kind = "fourier"

    def __init__(self, order: int, bounds):
        if order < 0:
            raise InvalidInputError(f"Fourier order must be >= 0, got {order}")
        dim = np.asarray(bounds).shape[0]
        self.order = int(order)
        self.coefficients = multi_indices(self.order, dim)
        super().__init__(self.coefficients.shape[0], bounds)

    def evaluate(self, state) -> np.ndarray:
        return np.cos(np.pi * self.coefficients @ self.normalize(state))

    def params(self) -> dict:
        return {"order": self.order, **super().params()}


class PolynomialBasis(BoundedBasis):
    """Monomials prod_i s_bar_i^c_i over c in {0..degree}^dim on the rescaled state."""

    kind = "polynomial"

    def __init__(self, degree: int, bounds):
        if degree < 0:
            raise InvalidInputError(f"polynomial degree must be >= 0, got {degree}")
        dim = np.asarray(bounds).shape[0]
        self.degree = int(degree)
        self.exponents = multi_indices(self.degree, dim)
        super().__init__(self.exponents.shape[0], bounds)

    def evaluate(self, state) -> np.ndarray:
        s_bar = self.normalize(state)
        return np.prod(s_bar[np.newaxis, :] ** self.exponents, axis=1)

    def params(self) -> dict:
        return {"degree": self.degree, **super().params()}


class RBFBasis(BoundedBasis):
    """
    Gaussian radial basis functions phi_i(s) = exp(-||s_bar - c_i||^2 / width_i^2).

    Centers and widths live in the rescaled [0, 1]^dim space.
    """

    kind = "rbf"

    def __init__(self, centers, widths, bounds):
        centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
        if centers.size == 0:
            raise InvalidInputError("RBF basis needs at least one center")
        widths = np.broadcast_to(np.asarray(widths, dtype=np.float64), (centers.shape[0],)).copy()
        if np.any(widths <= 0):
            raise InvalidInputError("RBF widths must be > 0")
        super().__init__(centers.shape[0], bounds)
        if centers.shape[1] != self.dim:
            raise InvalidInputError(f"centers have dimension {centers.shape[1]}, bounds have {self.dim}")
        centers.setflags(write=False)
        widths.setflags(write=False)
        self.centers = centers
        self.widths = widths

    def evaluate(self, state) -> np.ndarray:
        diff = self.centers - self.normalize(state)
        return np.exp(-np.sum(diff * diff, axis=1) / self.widths**2)

    def params(self) -> dict:
        return {"centers": self.centers.tolist(), "widths": self.widths.tolist(), **super().params()}


class StateActionBasis:
    """
    phi(s, a): the base features of s placed in the block of action a, zeros elsewhere.

    Attributes:
        base (FeatureBasis): State features.
        n_actions (int): Number of actions.
        d (int): base.d * n_actions.
    """

    def __init__(self, base: FeatureBasis, n_actions: int):
        if n_actions < 1:
            raise InvalidInputError(f"n_actions must be >= 1, got {n_actions}")
        self.base = base
        self.n_actions = int(n_actions)
        self.d = base.d * self.n_actions

    def evaluate(self, state, action: int) -> np.ndarray:
        if not 0 <= action < self.n_actions:
            raise InvalidStateError(f"action {action} out of range [0, {self.n_actions})")
        phi = np.zeros(self.d)
        k = self.base.d
        phi[action * k:(action + 1) * k] = self.base.evaluate(state)
        return phi

    def action_matrix(self, state) -> np.ndarray:
        """Rows phi(s, a) for every action, shape (n_actions, d)."""
        k = self.base.d
        phi_s = self.base.evaluate(state)
        rows = np.zeros((self.n_actions, self.d))
        for a in range(self.n_actions):
            rows[a, a * k:(a + 1) * k] = phi_s
        return rows

    def action_values(self, state, w) -> np.ndarray:
        """Q(s, .) = <phi(s, a), w> for every action in O(d)."""
        return np.asarray(w).reshape(self.n_actions, self.base.d) @ self.base.evaluate(state)


def tabular_basis(n_states: int) -> TabularBasis:
    """One-hot basis over `n_states` states."""
    return TabularBasis(n_states)


def fourier_basis(order: int, bounds) -> FourierBasis:
    """Order-`order` Fourier basis over the box `bounds` ((order+1)^dim features)."""
    return FourierBasis(order, bounds)


def polynomial_basis(degree: int, bounds) -> PolynomialBasis:
    """Full-grid polynomial basis of the given degree over the box `bounds`."""
    return PolynomialBasis(degree, bounds)


def rbf_basis(centers, widths, bounds) -> RBFBasis:
    """Gaussian RBF basis with the given centers/widths in rescaled coordinates."""
    return RBFBasis(centers, widths, bounds)


def rbf_grid(per_dim: int, bounds, width: float | None = None) -> RBFBasis:
    """RBF basis with `per_dim` evenly spaced centers per dimension; width defaults to the spacing."""
    if per_dim < 1:
        raise InvalidInputError(f"need at least one center per dimension, got {per_dim}")
    dim = np.asarray(bounds).shape[0]
    axis = np.linspace(0.0, 1.0, per_dim) if per_dim > 1 else np.array([0.5])
    centers = np.array(list(itertools.product(axis, repeat=dim)))
    if width is None:
        width = 1.0 / max(per_dim - 1, 1)
    return RBFBasis(centers, width, bounds)


def noisy_augment(base: FeatureBasis, n_noise: int, seed: int) -> FeatureBasis:
    """
    Append `n_noise` frozen Gaussian noise features to a discrete basis.

    With n_noise = 0 the base basis is returned unchanged.

    Raises:
        InvalidInputError: If n_noise < 0 or the base has no finite state space.
    """
    if n_noise < 0:
        raise InvalidInputError(f"n_noise must be >= 0, got {n_noise}")
    if n_noise == 0:
        return base
    return NoisyBasis(base, n_noise, seed)
