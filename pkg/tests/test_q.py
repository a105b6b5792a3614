"""
Tests for the action-value updates, action selection and the Learner wrapper.
"""

import math

import numpy as np
import pytest

from src.basis.bases import StateActionBasis, tabular_basis
from src.envs.solvers import value_iteration_exact
from src.envs.worlds import chain_mdp
from src.geometry.mirror_maps import EuclideanMap, NegEntropyMap, PNormMap
from src.learners.agents import Learner
from src.learners.q import (
    epsilon_greedy,
    greedy_action,
    greedy_value,
    mirror_q_step,
    q_learning_step,
)
from src.learners.schedules import AlphaSchedule, PSchedule
from src.learners.state import Hyperparameters, LearnerState
from src.utils.errors import InvalidInputError


def q_hyper(alpha=0.1, gamma=0.9, epsilon=0.2, **kwargs):
    """
    Hyperparameters for the action-value tests.

    Parameters:
    alpha (float): Constant step size.
    gamma (float): Discount factor.
    epsilon (float): Exploration rate.

    Returns:
    Hyperparameters: The bundle.
    """
    return Hyperparameters(alpha=AlphaSchedule("constant", alpha), gamma=gamma, epsilon=epsilon, **kwargs)


def train_on_chain(learner, m, steps, seed):
    """
    Feed a learner transitions from uniformly random start states with its own epsilon-greedy actions.

    Parameters:
    learner (Learner): Action-value learner.
    m (MdpModel): Environment.
    steps (int): Number of transitions.
    seed (int): Generator seed.
    """
    rng = np.random.default_rng(seed)
    for _ in range(steps):
        s = int(rng.integers(m.n_states))
        a = learner.act(s, rng)
        r, s_next, terminal = m.step(s, a, rng)
        learner.start_episode()
        learner.observe(s, a, r, s_next, terminal)


def test_greedy_tie_goes_to_lowest_index():
    """
    Verify ties between action values pick the lowest action index.
    """
    assert greedy_action([1.0, 3.0, 3.0]) == 1
    assert greedy_action([2.0, 2.0]) == 0


def test_epsilon_greedy_limits():
    """
    Verify epsilon = 0 is greedy, epsilon = 1 explores every action and bad epsilons raise.
    """
    rng = np.random.default_rng(0)
    q = [0.0, 5.0, 1.0]
    assert all(epsilon_greedy(q, 0.0, rng) == 1 for _ in range(20))
    assert {epsilon_greedy(q, 1.0, rng) for _ in range(200)} == {0, 1, 2}
    with pytest.raises(InvalidInputError):
        epsilon_greedy(q, 1.5, rng)


def test_greedy_value():
    """
    Verify the bootstrap value is the max over action rows and 0 when terminal.
    """
    w = np.array([1.0, 2.0, 3.0, 4.0])
    rows = StateActionBasis(tabular_basis(2), 2).action_matrix(1)
    assert greedy_value(w, rows) == 4.0
    assert greedy_value(w, None) == 0.0
    with pytest.raises(InvalidInputError):
        greedy_value(w, np.ones((2, 3)))


def test_euclidean_mirror_q_equals_q_learning():
    """
    Verify mirror_q_step with the Euclidean map reproduces q_learning_step to 1e-14.
    """
    sa = StateActionBasis(tabular_basis(3), 2)
    m = chain_mdp(3, 0.9)
    hyper = q_hyper(lam=0.5)
    a = LearnerState.zeros(sa.d, hyper)
    b = LearnerState.zeros(sa.d, hyper, dual_size=sa.d)
    rng = np.random.default_rng(1)
    s = 0
    for _ in range(500):
        action = int(rng.integers(2))
        r, s_next, _ = m.step(s, action, rng)
        q_learning_step(a, sa.evaluate(s, action), sa.action_matrix(s_next), r)
        mirror_q_step(b, EuclideanMap(), sa.evaluate(s, action), sa.action_matrix(s_next), r)
        s = s_next
    assert np.allclose(a.w, b.w, rtol=0.0, atol=1e-14)


@pytest.mark.parametrize("kind, link", [("q_learning", "euclidean"), ("mirror_q", "pnorm")])
def test_q_learners_reach_optimal_values(kind, link):
    """
    Verify on the 3-state chain that max_a Q(s, a) is within 1e-2 of V* after 1e5 steps.
    """
    m = chain_mdp(3, 0.9)
    v_star, _ = value_iteration_exact(m)
    hyper = q_hyper(p=PSchedule("fixed", p0=3.0))
    learner = Learner(kind, tabular_basis(3), hyper, n_actions=2, link=link)
    train_on_chain(learner, m, 100_000, seed=2)
    assert np.max(np.abs(learner.values() - v_star)) <= 1e-2


def test_learner_construction():
    """
    Verify dual sizes per link, the scaler for composite kinds and rejection of unknown kinds.
    """
    basis = tabular_basis(4)
    hyper = q_hyper()
    assert Learner("mirror_td", basis, hyper, link="pnorm").state.theta.size == 4
    assert Learner("sparse_td", basis, hyper, link="entropy").state.theta.size == 8
    assert Learner("td", basis, hyper).state.theta is None
    assert Learner("composite_q", basis, hyper, n_actions=3).scaler.G.size == 12
    with pytest.raises(InvalidInputError):
        Learner("gtd2", basis, hyper)
    with pytest.raises(InvalidInputError):
        Learner("mirror_td", basis, hyper, link="hyperbolic")


def test_learner_mirror_map_follows_p_schedule():
    """
    Verify the p-norm learner starts at max(2, ln d) and reaches 2 at the horizon.
    """
    hyper = q_hyper(p=PSchedule("decay", horizon=10))
    learner = Learner("mirror_td", tabular_basis(500), hyper, link="pnorm")
    assert learner.mirror_map() == PNormMap(math.log(500))
    learner.state.t = 10
    assert learner.mirror_map() == PNormMap(2.0)
    assert Learner("mirror_td", tabular_basis(3), hyper, link="euclidean").mirror_map() == EuclideanMap()
    assert Learner("mirror_td", tabular_basis(3), hyper, link="entropy", eg_mass=2.0).mirror_map() == NegEntropyMap(2.0)


def test_learner_values_and_epsilon_decay():
    """
    Verify TD learners value states through the basis, Q learners take the max,
    and epsilon decays multiplicatively.
    """
    td = Learner("td", tabular_basis(3), q_hyper())
    td.state.w = np.array([1.0, 2.0, 3.0])
    assert td.value(1) == 2.0
    assert np.array_equal(td.values(), [1.0, 2.0, 3.0])
    with pytest.raises(InvalidInputError):
        td.q_values(0)

    q = Learner("q_learning", tabular_basis(2), q_hyper(epsilon=0.5), n_actions=2)
    q.state.w = np.array([1.0, 5.0, 4.0, 2.0])
    assert np.array_equal(q.q_values(0), [1.0, 4.0])
    assert np.array_equal(q.values(), [4.0, 5.0])
    q.decay_epsilon(0.5)
    assert q.epsilon == 0.25


def test_learner_observe_terminal_transition():
    """
    Verify a terminal transition bootstraps from 0.
    """
    learner = Learner("sparse_td", tabular_basis(2), q_hyper(alpha=0.5), link="euclidean")
    learner.observe(0, 0, 1.0, 1, True)
    assert np.allclose(learner.weights, [0.5, 0.0])
