"""
Finite MDP model, policies and transitions.
"""

from dataclasses import dataclass, field

import numpy as np

from ..config import format_value, read_key_values
from ..utils.errors import ConstructionError, InvalidInputError, InvalidStateError

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Transition:
    """One observed step (s, a, r, s', terminal)."""

    s: object
    a: int
    r: float
    s_next: object
    terminal: bool


def _frozen(x, dtype=np.float64) -> np.ndarray:
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MdpModel:
    """
    Finite MDP.

    Attributes:
        P (np.ndarray): Transition tensor P[a, s, s'] of shape (A, S, S).
        R (np.ndarray): Expected reward R[a, s] for taking a in s, shape (A, S).
        gamma (float): Discount factor in [0, 1).
        terminal (np.ndarray): Boolean mask of absorbing states where episodes end.
        cells (tuple): Optional (row, col) grid coordinate per state.
        shape (tuple): Optional (height, width) of the grid the cells live on.
        name (str): Short identifier.

    Raises:
        ConstructionError: If a row of P is not a probability vector or gamma
            is outside [0, 1).
    """

    P: np.ndarray
    R: np.ndarray
    gamma: float
    terminal: np.ndarray = None
    cells: tuple = ()
    shape: tuple = ()
    name: str = "mdp"

    def __post_init__(self):
        P = _frozen(self.P)
        R = _frozen(self.R)
        if P.ndim != 3 or P.shape[1] != P.shape[2]:
            raise ConstructionError(f"P must have shape (A, S, S), got {P.shape}")
        if R.shape != P.shape[:2]:
            raise ConstructionError(f"R must have shape {P.shape[:2]}, got {R.shape}")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=2) - 1.0) > ROW_SUM_TOL):
            raise ConstructionError("every row P[a, s, :] must be nonnegative and sum to 1")
        if not np.all(np.isfinite(R)):
            raise ConstructionError("rewards must be finite")
        if not 0.0 <= self.gamma < 1.0:
            raise ConstructionError(f"gamma must satisfy 0 <= gamma < 1, got {self.gamma}")
        terminal = np.zeros(P.shape[1], dtype=bool) if self.terminal is None else self.terminal
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "terminal", _frozen(terminal, dtype=bool))
        object.__setattr__(self, "cells", tuple(tuple(c) for c in self.cells))
        object.__setattr__(self, "shape", tuple(self.shape))

    @property
    def n_states(self) -> int:
        return self.P.shape[1]

    @property
    def n_actions(self) -> int:
        return self.P.shape[0]

    @property
    def actions(self) -> list:
        return list(range(self.n_actions))

    def policy_transition(self, policy: "Policy") -> np.ndarray:
        """P^pi[s, s'] = sum_a pi(a|s) P[a, s, s']."""
        return np.einsum("sa,ast->st", policy.probs, self.P)

    def policy_reward(self, policy: "Policy") -> np.ndarray:
        """R^pi[s] = sum_a pi(a|s) R[a, s]."""
        return np.sum(policy.probs * self.R.T, axis=1)

    def adjacency(self) -> np.ndarray:
        """
        Symmetric 0/1 state graph: s ~ s' if some action moves s to s' (s != s').
        """
        A = (self.P.max(axis=0) > 0).astype(np.float64)
        A = np.maximum(A, A.T)
        np.fill_diagonal(A, 0.0)
        return A

    def reset(self, rng: np.random.Generator) -> int:
        """Uniformly random non-terminal start state."""
        starts = np.flatnonzero(~self.terminal)
        if starts.size == 0:
            return 0
        return int(starts[rng.integers(starts.size)])

    def step(self, state: int, action: int, rng: np.random.Generator) -> tuple[float, int, bool]:
        """
        Sample one transition.

        Returns:
            tuple: (reward, next state, next state is terminal).
        """
        if not 0 <= state < self.n_states:
            raise InvalidStateError(f"state {state} out of range [0, {self.n_states})")
        if not 0 <= action < self.n_actions:
            raise InvalidStateError(f"action {action} out of range [0, {self.n_actions})")
        row = self.P[action, state]
        nonzero = np.flatnonzero(row)
        if nonzero.size == 1:
            s_next = int(nonzero[0])
        else:
            s_next = int(rng.choice(self.n_states, p=row))
        return float(self.R[action, state]), s_next, bool(self.terminal[s_next])

    def to_text(self) -> str:
        """
        Serialize to the text format: a `key = value` header followed by
        `P a s` rows (one line of S probabilities each) and `R a` rows.
        """
        lines = [
            "# finite MDP",
            f"name = {format_value(self.name)}",
            f"n_states = {self.n_states}",
            f"n_actions = {self.n_actions}",
            f"gamma = {format_value(self.gamma)}",
            f"terminal = {format_value([int(s) for s in np.flatnonzero(self.terminal)])}",
            f"cells = {format_value([list(c) for c in self.cells])}",
            f"shape = {format_value(list(self.shape))}",
            "tables = 1",
        ]
        for a in range(self.n_actions):
            for s in range(self.n_states):
                lines.append(f"P {a} {s} " + " ".join(repr(float(x)) for x in self.P[a, s]))
        for a in range(self.n_actions):
            lines.append(f"R {a} " + " ".join(repr(float(x)) for x in self.R[a]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MdpModel":
        """Inverse of to_text."""
        all_lines = text.splitlines()
        try:
            split = next(i for i, line in enumerate(all_lines) if line.strip().startswith("tables"))
        except StopIteration:
            raise InvalidInputError("MDP text has no `tables` line")
        header = {key: value for _, key, value in read_key_values("\n".join(all_lines[:split + 1]))}
        n_s, n_a = header["n_states"], header["n_actions"]
        P = np.zeros((n_a, n_s, n_s))
        R = np.zeros((n_a, n_s))
        for line in all_lines[split + 1:]:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "P":
                P[int(parts[1]), int(parts[2])] = [float(x) for x in parts[3:]]
            elif parts[0] == "R":
                R[int(parts[1])] = [float(x) for x in parts[2:]]
            else:
                raise InvalidInputError(f"unexpected table line {line!r}")
        terminal = np.zeros(n_s, dtype=bool)
        terminal[header["terminal"]] = True
        return cls(P, R, header["gamma"], terminal, header["cells"], header["shape"], header["name"])


@dataclass(frozen=True, eq=False)
class Policy:
    """
    Stochastic policy as an (S, A) matrix of action probabilities.

    Deterministic policies are one-hot rows; `actions` returns their argmax.
    """

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 2:
            raise InvalidInputError(f"policy matrix must be 2-D, got shape {probs.shape}")
        if np.any(probs < 0) or np.any(np.abs(probs.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise InvalidInputError("policy rows must be probability vectors")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def deterministic(cls, actions, n_actions: int) -> "Policy":
        actions = np.asarray(actions, dtype=np.int64)
        probs = np.zeros((actions.size, n_actions))
        probs[np.arange(actions.size), actions] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, n_states: int, n_actions: int) -> "Policy":
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))

    @property
    def actions(self) -> np.ndarray:
        return np.argmax(self.probs, axis=1)

    @property
    def is_deterministic(self) -> bool:
        return bool(np.all(self.probs.max(axis=1) == 1.0))

    def sample(self, state: int, rng: np.random.Generator) -> int:
        row = self.probs[state]
        if row.max() == 1.0:
            return int(np.argmax(row))
        return int(rng.choice(row.size, p=row))

    def __call__(self, state, rng: np.random.Generator) -> int:
        return self.sample(state, rng)
