"""
Learner objects: a LearnerState wired to a feature basis, a mirror geometry
and one of the step functions, selected by learner id.
"""

import numpy as np

from ..basis.bases import FeatureBasis, StateActionBasis
from ..geometry.mirror_maps import EuclideanMap, MirrorMap, NegEntropyMap, PNormMap
from ..utils.errors import InvalidInputError
from . import q, td
from .state import AdaptiveScaler, Hyperparameters, LearnerState

TD_KINDS = ("td", "mirror_td", "sparse_td", "composite_td")
Q_KINDS = ("q_learning", "mirror_q", "sparse_q", "composite_q")
MIRROR_KINDS = ("mirror_td", "sparse_td", "mirror_q", "sparse_q")
COMPOSITE_KINDS = ("composite_td", "composite_q")


class Learner:
    """
    A linear value learner.

    TD kinds estimate V(s) = <phi(s), w> for a fixed behaviour policy;
    Q kinds estimate Q(s, a) = <phi(s, a), w> and pick actions epsilon-greedily.

    Args:
        kind (str): One of TD_KINDS or Q_KINDS.
        basis (FeatureBasis): State features.
        hyper (Hyperparameters): Step size, trace, sparsity and p schedules.
        n_actions (int): Number of actions (Q kinds only).
        link (str): "euclidean", "pnorm" or "entropy" (mirror kinds only).
        eg_mass (float | None): Total-mass renormalisation for the entropy link.
        h_floor (float): Floor eta of the composite scaler.
        covariance_mode (str): "features" or "gradient" for the composite scaler.
    """

    def __init__(
        self,
        kind: str,
        basis: FeatureBasis,
        hyper: Hyperparameters,
        n_actions: int = 1,
        link: str = "pnorm",
        eg_mass: float | None = None,
        h_floor: float = 1e-6,
        covariance_mode: str = "features",
    ):
        if kind not in TD_KINDS + Q_KINDS:
            raise InvalidInputError(f"unknown learner {kind!r}")
        if link not in ("euclidean", "pnorm", "entropy"):
            raise InvalidInputError(f"unknown link {link!r}")
        self.kind = kind
        self.basis = basis
        self.link = link
        self.is_q = kind in Q_KINDS
        self.features = StateActionBasis(basis, n_actions) if self.is_q else basis
        self.n_actions = n_actions
        d = self.features.d

        dual_size = None
        if kind in MIRROR_KINDS:
            dual_size = 2 * d if link == "entropy" else d
        self.state = LearnerState.zeros(d, hyper, dual_size)
        self.scaler = AdaptiveScaler.zeros(d, h_floor, covariance_mode) if kind in COMPOSITE_KINDS else None
        self.epsilon = hyper.epsilon
        self._entropy = NegEntropyMap(eg_mass) if link == "entropy" else None

    @property
    def d(self) -> int:
        return self.state.d

    @property
    def weights(self) -> np.ndarray:
        return self.state.w.copy()

    @property
    def hyper(self) -> Hyperparameters:
        return self.state.hyper

    def mirror_map(self) -> MirrorMap:
        """Geometry used at the current step; the p-norm link follows the p schedule."""
        if self.link == "euclidean":
            return EuclideanMap()
        if self.link == "entropy":
            return self._entropy
        return PNormMap(self.hyper.p(self.state.t, self.d))

    def start_episode(self) -> None:
        self.state.start_episode()

    def decay_epsilon(self, factor: float) -> None:
        self.epsilon *= factor

    def value(self, state) -> float:
        if self.is_q:
            return float(np.max(self.q_values(state)))
        return float(np.dot(self.basis.evaluate(state), self.state.w))

    def values(self) -> np.ndarray:
        """Value of every state of a discrete basis (max over actions for Q kinds)."""
        if self.is_q:
            W = self.state.w.reshape(self.n_actions, self.basis.d)
            return (self.basis.matrix() @ W.T).max(axis=1)
        return self.basis.matrix() @ self.state.w

    def q_values(self, state) -> np.ndarray:
        if not self.is_q:
            raise InvalidInputError(f"{self.kind} learner has no action values")
        return self.features.action_values(state, self.state.w)

    def act(self, state, rng: np.random.Generator) -> int:
        return q.epsilon_greedy(self.q_values(state), self.epsilon, rng)

    def observe(self, s, a: int, r: float, s_next, terminal: bool) -> None:
        """
        Apply one update for the transition (s, a, r, s').

        Raises:
            DivergenceError: If the weights leave the divergence limit.
        """
        if self.is_q:
            phi = self.features.evaluate(s, a)
            phi_next = None if terminal else self.features.action_matrix(s_next)
            steps = {
                "q_learning": lambda: q.q_learning_step(self.state, phi, phi_next, r),
                "mirror_q": lambda: q.mirror_q_step(self.state, self.mirror_map(), phi, phi_next, r),
                "sparse_q": lambda: q.sparse_mirror_q_step(self.state, self.mirror_map(), phi, phi_next, r),
                "composite_q": lambda: q.composite_q_step(self.state, self.scaler, phi, phi_next, r),
            }
        else:
            phi = self.basis.evaluate(s)
            phi_next = None if terminal else self.basis.evaluate(s_next)
            steps = {
                "td": lambda: td.td_step(self.state, phi, phi_next, r),
                "mirror_td": lambda: td.mirror_td_step(self.state, self.mirror_map(), phi, phi_next, r),
                "sparse_td": lambda: td.sparse_mirror_td_step(self.state, self.mirror_map(), phi, phi_next, r),
                "composite_td": lambda: td.composite_md_step(self.state, self.scaler, phi, phi_next, r),
            }
        steps[self.kind]()
