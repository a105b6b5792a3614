import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .envs.mdp import Policy
from .envs.solvers import policy_evaluation_exact, q_values_exact, value_iteration_exact
from .envs.worlds import chain_mdp, load_grid, open_grid, random_mdp, two_room_world
from .harness import tables
from .harness.checks import CHECK_COLUMNS, SUITES, run_suite
from .harness.experiment import build_basis, build_environment, run_experiment
from .harness.sweep import load_grid as load_sweep_grid
from .harness.sweep import sweep
from .learners.state import LearnerState
from .plotting import PANELS, emit_plots
from .utils.errors import ConfigError, ConstructionError, InvalidInputError
from .utils.logger import reset_logger, setup_logger

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_CHECK_FAILED = 0, 1, 2, 3


def looks_like_result_folder(path: Path) -> bool:
    """
    Check if a folder appears to be an experiment result folder.

    Heuristic check: returns True if folder contains log files, runs.csv,
    sweep.csv or video.avi. Used to prevent accidentally overwriting other
    folders with new results.

    Args:
        path (Path): Folder path to check.

    Returns:
        bool: True if folder appears to contain results, False otherwise.
    """
    if not path.is_dir():
        return False
    if any(path.glob("*.log")):
        return True
    for name in ("runs.csv", "sweep.csv", "video.avi"):
        if (path / name).exists():
            return True
    return False


def prepare_result_folder(result_folder: Path) -> Path:
    """
    Create the result folder, refusing to write into a non-empty folder that is not a result folder.

    Raises:
        FileExistsError: If the folder exists, is not empty and does not look like a result folder.
    """
    if result_folder.exists() and any(result_folder.iterdir()) and not looks_like_result_folder(result_folder):
        raise FileExistsError(f"Will not overwrite existing non-result folder: {result_folder}")
    result_folder.mkdir(parents=True, exist_ok=True)
    return result_folder


def final_values(config, env, weights: np.ndarray) -> np.ndarray:
    """Value per state of a discrete environment from final weights (max over actions for Q learners)."""
    phi = build_basis(config, env).matrix()
    if config.is_q_learner:
        return (phi @ weights.reshape(env.n_actions, phi.shape[1]).T).max(axis=1)
    return phi @ weights


def default_panels(config) -> list[str]:
    panels = ["learning_curve", "weight_delta", "sparsity"]
    if config.is_discrete:
        panels.append("bellman_error")
    if config.env in ("grid", "two_room"):
        panels.append("heatmap")
    return panels


def run_single_config(config_path: Path, out_dir: Path | None = None) -> int:
    """
    Run one experiment configuration.

    Workflow:
    1. Load and validate the configuration
    2. Create the result folder (with the overwrite safety check)
    3. Set up logging to the result folder
    4. Run every trial and write runs.csv, timing.csv and learner snapshots
    5. Save the standard plots and, if enabled, the value-function video

    Args:
        config_path (Path): Path to the configuration file.
        out_dir (Path, optional): Result folder; defaults to results/<config name>.

    Returns:
        int: EXIT_DIVERGED if any trial diverged, EXIT_OK otherwise.

    Raises:
        FileExistsError: If the result folder is not a result folder.
        FileNotFoundError: If the config or a referenced map file is missing.
        ConfigError: If the configuration is invalid.
    """
    config = load_config(config_path)
    result_folder = prepare_result_folder(out_dir or Path("results") / config_path.stem)

    # Each config logs to its own file in batch mode
    reset_logger()
    logger = setup_logger(log_name=config.log_name, level=logging.INFO, folder=result_folder)

    logger.info("Experiment started.")
    logger.info(f"Config file: {config_path}")
    logger.info("Resolved parameters:")
    for k, v in config.raw().items():
        logger.info(f"  {k} = {v}")

    result = run_experiment(config, result_folder, logger)

    env = build_environment(config)
    values = None
    if config.env in ("grid", "two_room") and result.trials[0].weights is not None:
        values = final_values(config, env, result.trials[0].weights)
    if result.records:
        emit_plots(result.records, default_panels(config), result_folder, env if values is not None else None, values)
    else:
        logger.warning("No completed episodes; plots skipped")

    if result.diverged:
        logger.warning(f"{len(result.diverged)} of {config.trials} trials diverged")
        return EXIT_DIVERGED
    return EXIT_OK


def command_run(args) -> int:
    # Batch mode: run every config in a folder
    if args.find == "all":
        search_folder = Path(args.folder) if args.folder else Path(".")
        if not search_folder.exists() or not search_folder.is_dir():
            raise FileNotFoundError(f"Folder not found: {search_folder}")

        config_files = sorted([p for p in search_folder.glob("*.toml") if p.is_file()])
        if not config_files:
            print(f"No .toml config files found in {search_folder}")
            return EXIT_OK

        code = EXIT_OK
        for cfg in config_files:
            out_dir = Path(args.out) / cfg.stem if args.out else None
            code = max(code, run_single_config(cfg, out_dir))
        return code

    return run_single_config(Path(args.config), Path(args.out) if args.out else None)


def command_sweep(args) -> int:
    config_path = Path(args.config)
    config = load_config(config_path)
    grid = load_sweep_grid(args.grid)
    result_folder = prepare_result_folder(Path(args.out) if args.out else Path("results") / f"{config_path.stem}_sweep")

    reset_logger()
    logger = setup_logger(log_name=config.log_name, level=logging.INFO, folder=result_folder)
    logger.info(f"Sweep started: config {config_path}, grid {args.grid}")

    rows = sweep(config, grid, result_folder, logger)
    return EXIT_DIVERGED if any(row["diverged"] for row in rows) else EXIT_OK


def exact_environment(args):
    if args.env == "chain":
        return chain_mdp(args.n_states, args.gamma)
    if args.env == "grid":
        if args.grid_map:
            return load_grid(args.grid_map, args.gamma)
        return open_grid(args.width, args.height, args.gamma)
    if args.env == "two_room":
        return two_room_world(args.gamma)
    return random_mdp(args.n_states, args.n_actions, args.gamma, args.env_seed)


def command_solve_exact(args) -> int:
    """Print V*, V^pi and the greedy action per state as CSV on stdout."""
    m = exact_environment(args)
    v_star, pi_star = value_iteration_exact(m)
    policy = pi_star if args.policy == "optimal" else Policy.uniform(m.n_states, m.n_actions)
    v_pi = policy_evaluation_exact(m, policy)
    greedy = np.argmax(q_values_exact(m, v_star), axis=1)

    print("state,v_star,v_pi,greedy_action")
    for s in range(m.n_states):
        print(f"{s},{v_star[s]!r},{v_pi[s]!r},{greedy[s]}")
    return EXIT_OK


def command_check(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    for r in results:
        print(f"{r.suite}/{r.name}: {r.value:.6e} <= {r.threshold:.6e} {'PASS' if r.passed else 'FAIL'}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        tables.write_rows(out / f"check_{args.suite}.csv", CHECK_COLUMNS, [r.to_row() for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def command_plot(args) -> int:
    """
    Plot panels from a runs.csv table. Heat maps rebuild the environment from
    resolved.toml and read weights_trial0.txt in the table's folder.
    """
    table = Path(args.table)
    records = tables.read_records(table)
    out_dir = Path(args.out) if args.out else table.parent

    m = values = None
    if "heatmap" in args.panel:
        config = load_config(table.parent / "resolved.toml")
        snapshot = table.parent / "weights_trial0.txt"
        if not snapshot.exists():
            raise FileNotFoundError(f"Learner snapshot not found: {snapshot}")
        env = build_environment(config)
        if config.is_discrete:
            m = env
            w = LearnerState.from_text(snapshot.read_text(encoding="utf-8")).w
            values = final_values(config, env, w)

    for path in emit_plots(records, args.panel, out_dir, m, values):
        print(f"Wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Mirror-descent TD learning: experiments, sweeps, exact oracles and verification checks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one experiment config (or every config in a folder)")
    run.add_argument("-c", "--config", default="input.toml", help="Path to config file (default: input.toml)")
    run.add_argument("--out", default=None, help="Result folder (default: results/<config name>)")
    run.add_argument(
        "--find", choices=["all"], default=None, help="Find and run all config files in a folder (use: --find all)"
    )
    run.add_argument(
        "-f", "--folder", default=None,
        help="Folder to search for config files when using --find all (default: current directory)",
    )
    run.set_defaults(handler=command_run)

    sw = sub.add_parser("sweep", help="Run a hyperparameter grid")
    sw.add_argument("-c", "--config", required=True, help="Base config file")
    sw.add_argument("--grid", required=True, help="Grid file with `key = [values]` lines")
    sw.add_argument("--out", default=None, help="Result folder (default: results/<config name>_sweep)")
    sw.set_defaults(handler=command_sweep)

    solve = sub.add_parser("solve-exact", help="Print exact V* and V^pi as CSV")
    solve.add_argument("--env", choices=["chain", "grid", "two_room", "random"], required=True)
    solve.add_argument("--gamma", type=float, required=True)
    solve.add_argument("--n-states", type=int, default=5)
    solve.add_argument("--n-actions", type=int, default=2)
    solve.add_argument("--env-seed", type=int, default=0)
    solve.add_argument("--width", type=int, default=10)
    solve.add_argument("--height", type=int, default=10)
    solve.add_argument("--grid-map", default=None, help="ASCII map file for --env grid")
    solve.add_argument("--policy", choices=["optimal", "uniform"], default="optimal")
    solve.set_defaults(handler=command_solve_exact)

    check = sub.add_parser("check", help="Run a verification suite")
    check.add_argument("--suite", choices=SUITES, required=True)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--out", default=None, help="Folder for check_<suite>.csv")
    check.set_defaults(handler=command_check)

    plot = sub.add_parser("plot", help="Plot panels from a runs.csv table")
    plot.add_argument("--table", required=True, help="Path to runs.csv")
    plot.add_argument("--panel", action="append", choices=PANELS, required=True, help="Panel name (repeatable)")
    plot.add_argument("--out", default=None, help="Output folder (default: the table's folder)")
    plot.set_defaults(handler=command_plot)
    return parser


def main(argv=None) -> int:
    """
    Entry point.

    Exit codes: 0 success, 1 configuration error, 2 when the only failures
    were diverged trials, 3 when a check suite reports FAIL.

    Examples:
        python -m src.main run -c input.toml
        python -m src.main run --find all -f configs/
        python -m src.main sweep -c input.toml --grid grid.toml
        python -m src.main solve-exact --env chain --gamma 0.9
        python -m src.main check --suite contraction
        python -m src.main plot --table results/input/runs.csv --panel learning_curve
    """
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, InvalidInputError, ConstructionError, FileNotFoundError, FileExistsError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
