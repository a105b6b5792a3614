import numpy as np


class ContinuousEnv:
    """
    Episodic environment with a real-valued state vector and a finite action list.

    `step` is a pure function of (state, action): the environment holds no
    mutable state, so one instance can serve any number of concurrent rollouts.

    Attributes:
        actions (list): Available actions; agents refer to them by index.
        bounds (np.ndarray): Per-dimension [lo, hi] state bounds.
        horizon (int): Default episode length cap.
    """

    actions: list = []
    bounds: np.ndarray = np.zeros((0, 2))
    horizon: int = 1000

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def reset(self, rng: np.random.Generator | None = None) -> np.ndarray:
        raise NotImplementedError

    def step(self, state, action: int, rng: np.random.Generator | None = None) -> tuple[float, np.ndarray, bool]:
        raise NotImplementedError

    def is_goal(self, state) -> bool:
        raise NotImplementedError


class MountainCar(ContinuousEnv):
    """
    Classic mountain car.

    velocity += 0.001 * force - 0.0025 * cos(3 * position), clamped to +-0.07;
    position += velocity, clamped to [-1.2, 0.6]; hitting the left wall zeroes
    the velocity. Reward -1 per step, episode ends when position >= 0.5.
    Start state is (-0.5, 0).
    """

    actions = [-1, 0, 1]
    bounds = np.array([[-1.2, 0.6], [-0.07, 0.07]])
    horizon = 1000

    MIN_POSITION, MAX_POSITION = -1.2, 0.6
    MAX_SPEED = 0.07
    GOAL_POSITION = 0.5
    FORCE = 0.001
    GRAVITY = 0.0025

    def reset(self, rng=None) -> np.ndarray:
        return np.array([-0.5, 0.0])

    def step(self, state, action: int, rng=None) -> tuple[float, np.ndarray, bool]:
        position, velocity = float(state[0]), float(state[1])
        force = self.actions[action]

        velocity += self.FORCE * force - self.GRAVITY * np.cos(3.0 * position)
        velocity = min(max(velocity, -self.MAX_SPEED), self.MAX_SPEED)
        position += velocity
        position = min(max(position, self.MIN_POSITION), self.MAX_POSITION)

        # Inelastic left wall
        if position == self.MIN_POSITION and velocity < 0:
            velocity = 0.0

        s_next = np.array([position, velocity])
        return -1.0, s_next, self.is_goal(s_next)

    def is_goal(self, state) -> bool:
        return bool(state[0] >= self.GOAL_POSITION)


def mountain_car() -> MountainCar:
    return MountainCar()
