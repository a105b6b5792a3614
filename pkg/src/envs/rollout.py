import numpy as np

from ..utils.errors import InvalidInputError
from .mdp import Transition


def rollout(env, policy, max_steps: int, seed: int, start=None) -> list[Transition]:
    """
    Run one episode and return its transitions.

    The rollout owns a generator seeded with `seed`, so equal seeds give
    identical traces and concurrent rollouts are independent.

    Args:
        env: MdpModel or ContinuousEnv (anything with reset/step).
        policy: Callable (state, rng) -> action index; Policy objects qualify.
        max_steps (int): Step cap, >= 1.
        seed (int): Seed for the rollout's own generator.
        start: Optional start state; defaults to env.reset(rng).

    Returns:
        list[Transition]: Ends at the first terminal transition or after max_steps.
    """
    if max_steps < 1:
        raise InvalidInputError(f"max_steps must be >= 1, got {max_steps}")
    rng = np.random.default_rng(seed)
    state = env.reset(rng) if start is None else start
    trace = []
    for _ in range(max_steps):
        action = policy(state, rng)
        reward, s_next, terminal = env.step(state, action, rng)
        trace.append(Transition(state, action, reward, s_next, terminal))
        if terminal:
            break
        state = s_next
    return trace
