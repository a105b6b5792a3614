"""
Seeded multi-trial experiment runner.

An Experiment is one trial: its own learner, its own random generator and a
shared, immutable environment and basis. run_experiment runs `trials`
Experiments on a thread pool and writes the results.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..analysis.metrics import RunRecord, run_metrics
from ..analysis.operators import empirical_distribution
from ..basis.bases import fourier_basis, noisy_augment, polynomial_basis, rbf_grid, tabular_basis
from ..basis.pvf import pvf_basis
from ..config import ExperimentConfig
from ..envs.mdp import MdpModel, Policy
from ..envs.mountain_car import mountain_car
from ..envs.solvers import greedy_policy, value_iteration_exact
from ..envs.worlds import chain_mdp, load_grid, open_grid, random_mdp, two_room_world
from ..learners.agents import Learner
from ..learners.schedules import AlphaSchedule, PSchedule
from ..learners.state import Hyperparameters
from ..plotting import plot_value_heatmap
from ..utils.errors import DivergenceError
from ..video import make_video
from . import tables


def build_environment(config: ExperimentConfig):
    """MdpModel for discrete environments, a ContinuousEnv for mountain car."""
    if config.env == "chain":
        return chain_mdp(config.n_states, config.gamma)
    if config.env == "grid":
        if config.grid_map:
            return load_grid(config.grid_map, config.gamma)
        return open_grid(config.grid_width, config.grid_height, config.gamma)
    if config.env == "two_room":
        return two_room_world(config.gamma)
    if config.env == "random":
        return random_mdp(config.n_states, config.n_actions, config.gamma, config.env_seed)
    return mountain_car()


def build_basis(config: ExperimentConfig, env):
    if config.basis == "tabular":
        base = tabular_basis(env.n_states)
    elif config.basis == "pvf":
        base = pvf_basis(env.adjacency(), config.basis_size, config.normalized_laplacian)
    elif config.basis == "fourier":
        base = fourier_basis(config.fourier_order, env.bounds)
    elif config.basis == "polynomial":
        base = polynomial_basis(config.poly_degree, env.bounds)
    else:
        base = rbf_grid(config.rbf_per_dim, env.bounds, config.rbf_width or None)
    if config.noise_features > 0:
        return noisy_augment(base, config.noise_features, config.noise_seed)
    return base


def build_hyperparameters(config: ExperimentConfig) -> Hyperparameters:
    return Hyperparameters(
        alpha=AlphaSchedule(config.alpha_kind, config.alpha0, config.alpha_exponent),
        lam=config.lam,
        gamma=config.gamma,
        beta=config.beta,
        p=PSchedule(config.p_kind, config.p_horizon, config.p or None),
        epsilon=config.epsilon,
        trace_mode=config.trace_mode,
        divergence_limit=config.divergence_limit,
    )


def build_learner(config: ExperimentConfig, basis, n_actions: int) -> Learner:
    return Learner(
        config.learner,
        basis,
        build_hyperparameters(config),
        n_actions=n_actions,
        link=config.link,
        eg_mass=config.eg_mass or None,
        h_floor=config.h_floor,
        covariance_mode=config.covariance_mode,
    )


def evaluation_policy(config: ExperimentConfig, m: MdpModel) -> Policy:
    """Fixed policy followed by TD learners: greedy w.r.t. V* or uniform."""
    if config.policy == "uniform":
        return Policy.uniform(m.n_states, m.n_actions)
    return value_iteration_exact(m)[1]


@dataclass
class TrialResult:
    """
    Outcome of one trial.

    Attributes:
        trial (int): Trial index.
        seed (int): Seed of the trial's generator (base seed + trial).
        records (list[RunRecord]): One record per completed episode.
        weights (np.ndarray): Final weights.
        snapshot (str): Learner snapshot text.
        divergence (DivergenceError | None): Set when the run was aborted.
    """

    trial: int
    seed: int
    records: list = field(default_factory=list)
    weights: np.ndarray = None
    snapshot: str = ""
    divergence: DivergenceError | None = None


class Experiment:
    """
    One seeded trial of a learner on an environment.

    Args:
        config (ExperimentConfig): Validated configuration.
        env: Environment (MdpModel or ContinuousEnv); never mutated.
        basis (FeatureBasis): State features; never mutated.
        trial (int): Trial index; the generator is seeded with base_seed + trial.
        frame_dir (Path, optional): Folder for value-function frames.

    Example:
        config = load_config("input.toml")
        env = build_environment(config)
        result = Experiment(config, env, build_basis(config, env), trial=0).run()
    """

    def __init__(self, config: ExperimentConfig, env, basis, trial: int, frame_dir: Path | None = None):
        self.config = config
        self.env = env
        self.basis = basis
        self.trial = trial
        self.seed = config.base_seed + trial
        self.frame_dir = frame_dir
        self.model = env if isinstance(env, MdpModel) else None
        self.learner = build_learner(config, basis, env.n_actions)
        self.policy = None
        if self.model is not None and not self.learner.is_q:
            self.policy = evaluation_policy(config, self.model)
        self.clamped = 0

    def run_episode(self, rng: np.random.Generator) -> tuple[int, float, list, float]:
        """
        Run one episode from a fresh start state.

        Returns:
            tuple: (steps, return, visited states, median wall clock per step).
        """
        learner = self.learner
        learner.start_episode()
        state = self.env.reset(rng)
        visited = []
        durations = []
        total = 0.0
        discount = 1.0
        for _ in range(self.config.max_steps):
            start = time.perf_counter()
            if learner.is_q:
                action = learner.act(state, rng)
            else:
                action = self.policy(state, rng)
            reward, s_next, terminal = self.env.step(state, action, rng)
            learner.observe(state, action, reward, s_next, terminal)
            durations.append(time.perf_counter() - start)

            visited.append(state)
            total += discount * reward
            discount *= self.config.gamma
            if self.model is None and self.basis.out_of_bounds(s_next):
                self.clamped += 1
            if terminal:
                break
            state = s_next
        return len(durations), total, visited, float(np.median(durations))

    def run(self, logger: logging.Logger | None = None) -> TrialResult:
        """
        Run every episode; a DivergenceError ends the trial and is recorded.

        Returns:
            TrialResult: Records for the completed episodes.
        """
        config = self.config
        rng = np.random.default_rng(self.seed)
        result = TrialResult(self.trial, self.seed)
        history, steps, returns, clocks, policies, visited = [], [], [], [], [], []

        if logger:
            logger.info(f"Trial {self.trial} started (seed {self.seed}, d = {self.learner.d})")

        for k in range(config.episodes):
            try:
                n, total, states, clock = self.run_episode(rng)
            except DivergenceError as e:
                result.divergence = e
                if logger:
                    logger.warning(f"Trial {self.trial} diverged in episode {k}: {e}")
                break
            history.append(self.learner.weights)
            steps.append(n)
            returns.append(total)
            clocks.append(clock)
            policies.append(self.policy)
            if self.model is not None:
                visited.extend(states)

            if self.frame_dir is not None and config.write_frequency > 0 and k % config.write_frequency == 0:
                plot_value_heatmap(
                    self.model, self.learner.values(), self.frame_dir / f"img_{k:04d}.png", title=f"episode {k}"
                )

            if self.learner.is_q:
                self.learner.decay_epsilon(config.epsilon_decay)
            elif config.improve_every > 0 and (k + 1) % config.improve_every == 0:
                self.policy = greedy_policy(self.model, self.learner.values())
                if logger:
                    logger.info(f"Trial {self.trial}: policy improved after episode {k}")

        if history:
            phi = rho = None
            if self.model is not None:
                phi = self.basis.matrix()
                rho = empirical_distribution(visited, self.model.n_states)
            result.records = run_metrics(
                history,
                self.model,
                policies,
                phi,
                rho,
                trial=self.trial,
                steps=steps,
                returns=returns,
                wall_clock=clocks,
                action_values=self.learner.is_q,
            )
        result.weights = self.learner.weights
        result.snapshot = self.learner.state.to_text()

        if logger:
            last = result.records[-1] if result.records else None
            summary = f"{len(result.records)} episodes"
            if last is not None:
                summary += f", final bellman_error={last.bellman_error:.6e}, nnz={last.nnz}, steps={last.steps}"
            if self.clamped:
                summary += f", {self.clamped} states clamped to the basis bounds"
            logger.info(f"Trial {self.trial} finished: {summary}")
        return result


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list

    @property
    def records(self) -> list[RunRecord]:
        return tables.sort_records(r for t in self.trials for r in t.records)

    @property
    def diverged(self) -> list[TrialResult]:
        return [t for t in self.trials if t.divergence is not None]


def run_experiment(
    config: ExperimentConfig, out_dir: str | Path | None = None, logger: logging.Logger | None = None
) -> ExperimentResult:
    """
    Run config.trials seeded trials and optionally write the results.

    Trial i uses seed base_seed + i. Trials run on config.workers threads and
    share nothing mutable, so the output does not depend on the thread count.

    Files written to out_dir:
        resolved.toml, runs.csv, timing.csv, divergence.csv,
        weights_trial<i>.txt (learner snapshots), and video.avi when
        writeFrequency > 0.

    Raises:
        ConstructionError, InvalidInputError: Environment or basis construction
            failures, prefixed with the config's env/basis ids.
    """
    try:
        env = build_environment(config)
        basis = build_basis(config, env)
    except ValueError as e:
        raise type(e)(f"[env={config.env}, basis={config.basis}] {e}") from e

    if logger:
        logger.info(f"Experiment: env={config.env}, basis={config.basis} (d={basis.d}), learner={config.learner}")

    frame_dir = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "resolved.toml").write_text(config.to_text(), encoding="utf-8")
        if config.write_frequency > 0:
            frame_dir = out_dir / "frames"
            frame_dir.mkdir(exist_ok=True)
            for f in frame_dir.glob("img_*.png"):
                f.unlink()

    experiments = [
        Experiment(config, env, basis, i, frame_dir if i == 0 else None) for i in range(config.trials)
    ]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        trials = list(pool.map(lambda e: e.run(logger), experiments))
    result = ExperimentResult(config, trials)

    if out_dir is not None:
        tables.write_records(out_dir, result.records)
        tables.write_rows(
            out_dir / "divergence.csv",
            ("trial", "step", "weight_norm"),
            [{"trial": t.trial, "step": t.divergence.step, "weight_norm": t.divergence.weight_norm} for t in result.diverged],
        )
        for t in trials:
            (out_dir / f"weights_trial{t.trial}.txt").write_text(t.snapshot, encoding="utf-8")
        if frame_dir is not None and any(frame_dir.glob("img_*.png")):
            make_video(frame_dir, out_dir / "video.avi")

    if logger:
        logger.info(f"Experiment finished: {len(trials)} trials, {len(result.diverged)} diverged")
    return result
