"""
Per-episode run metrics.
"""

from dataclasses import dataclass

import numpy as np

from ..envs.mdp import MdpModel, Policy
from ..utils.errors import InvalidInputError
from .operators import bellman_apply, bellman_optimality_apply_q
from .projections import WeightedNorm

# Weights with |w_j| above this count as nonzero
NONZERO_TOL = 1e-12

RUN_COLUMNS = (
    "trial",
    "episode",
    "steps",
    "return",
    "bellman_error",
    "delta_l2",
    "delta_linf",
    "l1_norm",
    "nnz",
    "wall_clock_per_step",
)


@dataclass(frozen=True)
class RunRecord:
    """One row per (trial, episode). `episode_return` is written as the `return` column."""

    trial: int
    episode: int
    steps: int
    episode_return: float
    bellman_error: float
    delta_l2: float
    delta_linf: float
    l1_norm: float
    nnz: int
    wall_clock_per_step: float

    def to_row(self) -> dict:
        return {
            "trial": self.trial,
            "episode": self.episode,
            "steps": self.steps,
            "return": self.episode_return,
            "bellman_error": self.bellman_error,
            "delta_l2": self.delta_l2,
            "delta_linf": self.delta_linf,
            "l1_norm": self.l1_norm,
            "nnz": self.nnz,
            "wall_clock_per_step": self.wall_clock_per_step,
        }

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        return cls(
            trial=int(row["trial"]),
            episode=int(row["episode"]),
            steps=int(row["steps"]),
            episode_return=float(row["return"]),
            bellman_error=float(row["bellman_error"]),
            delta_l2=float(row["delta_l2"]),
            delta_linf=float(row["delta_linf"]),
            l1_norm=float(row["l1_norm"]),
            nnz=int(row["nnz"]),
            wall_clock_per_step=float(row.get("wall_clock_per_step") or "nan"),
        )


def bellman_error(m: MdpModel, policy: Policy, phi, w, rho) -> float:
    """||T^pi Phi w - Phi w||_rho."""
    V = np.asarray(phi) @ np.asarray(w)
    return WeightedNorm(rho)(bellman_apply(m, policy, V) - V)


def q_bellman_error(m: MdpModel, phi, w, rho) -> float:
    """
    Optimality residual of a linear Q function with block state-action weights.

    Q(s, a) = <phi(s), w_a> where w = [w_0, ..., w_{A-1}]. The residual
    (T Q - Q)^2 is averaged over actions and rho-weighted over states.
    """
    phi = np.asarray(phi, dtype=np.float64)
    W = np.asarray(w, dtype=np.float64).reshape(m.n_actions, phi.shape[1])
    Q = phi @ W.T
    diff = bellman_optimality_apply_q(m, Q) - Q
    norm = WeightedNorm(rho)
    return float(np.sqrt(np.sum(norm.rho * np.mean(diff * diff, axis=1))))


def run_metrics(
    history,
    m: MdpModel | None,
    policy,
    phi,
    rho=None,
    *,
    trial: int = 0,
    steps=None,
    returns=None,
    wall_clock=None,
    action_values: bool = False,
) -> list[RunRecord]:
    """
    Build one RunRecord per episode from the weights held at the end of each episode.

    Args:
        history: Sequence of weight vectors, one per episode.
        m (MdpModel | None): The MDP, or None for environments without a model
            (bellman_error is then NaN).
        policy: Evaluated policy (TD learners), or one policy per episode when
            the policy changes during the run.
        phi: |S| x d state feature matrix, or None without a model.
        rho: State distribution for the Bellman error; uniform when None.
        trial (int): Trial index written to every record.
        steps, returns, wall_clock: Per-episode step counts, returns and
            per-step wall clock; zeros/NaN when omitted.
        action_values (bool): Treat w as block state-action weights and report
            the Q optimality residual.

    Raises:
        InvalidInputError: If history is empty or per-episode lists differ in length.
    """
    history = [np.asarray(w, dtype=np.float64) for w in history]
    n = len(history)
    if n == 0:
        raise InvalidInputError("run_metrics needs at least one episode")
    steps = [0] * n if steps is None else list(steps)
    returns = [0.0] * n if returns is None else list(returns)
    wall_clock = [float("nan")] * n if wall_clock is None else list(wall_clock)
    if not len(steps) == len(returns) == len(wall_clock) == n:
        raise InvalidInputError("per-episode columns must match the history length")
    policies = list(policy) if isinstance(policy, (list, tuple)) else [policy] * n
    if len(policies) != n:
        raise InvalidInputError("need one policy per episode")
    if m is not None and rho is None:
        rho = np.full(m.n_states, 1.0 / m.n_states)

    records = []
    previous = None
    for k, w in enumerate(history):
        if m is None:
            error = float("nan")
        elif action_values:
            error = q_bellman_error(m, phi, w, rho)
        else:
            error = bellman_error(m, policies[k], phi, w, rho)
        if previous is None:
            delta_l2 = delta_linf = 0.0
        else:
            delta = w - previous
            delta_l2 = float(np.linalg.norm(delta))
            delta_linf = float(np.max(np.abs(delta)))
        records.append(
            RunRecord(
                trial=trial,
                episode=k,
                steps=int(steps[k]),
                episode_return=float(returns[k]),
                bellman_error=error,
                delta_l2=delta_l2,
                delta_linf=delta_linf,
                l1_norm=float(np.sum(np.abs(w))),
                nnz=int(np.count_nonzero(np.abs(w) > NONZERO_TOL)),
                wall_clock_per_step=float(wall_clock[k]),
            )
        )
        previous = w
    return records
