"""
Hyperparameter sweeps over the cross product of a parameter grid.
"""

import itertools
import logging
from pathlib import Path

import numpy as np

from ..config import FIELDS_BY_KEY, HYPER_KEYS, ExperimentConfig, read_key_values
from ..utils.errors import ConfigError, InvalidInputError
from . import tables
from .experiment import run_experiment

SUMMARY_METRICS = ("bellman_error", "nnz", "l1_norm", "steps", "return")


def parse_grid(text: str) -> dict:
    """
    Read a sweep grid: `key = [v1, v2, ...]` lines over hyperparameter keys.

    A scalar value is a one-element axis.

    Raises:
        ConfigError: Unknown or non-hyperparameter key, or an empty axis.
        InvalidInputError: If the grid has no axes.
    """
    grid = {}
    for line_no, key, value in read_key_values(text):
        if key not in FIELDS_BY_KEY:
            raise ConfigError(f"unknown key {key!r}", line_no)
        if key not in HYPER_KEYS:
            raise ConfigError(f"{key!r} is not a hyperparameter and cannot be swept", line_no)
        values = value if isinstance(value, list) else [value]
        if not values:
            raise ConfigError(f"empty value list for {key!r}", line_no)
        grid[key] = values
    if not grid:
        raise InvalidInputError("sweep grid is empty")
    return grid


def load_grid(filename: str | Path) -> dict:
    path = Path(filename)
    if not path.exists():
        raise FileNotFoundError(f"Grid file not found: {filename}")
    return parse_grid(path.read_text(encoding="utf-8"))


def grid_cells(grid: dict) -> list[dict]:
    """Cross product of the grid axes, first key varying slowest."""
    if not grid:
        raise InvalidInputError("sweep grid is empty")
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def summarize(cell: dict, result) -> dict:
    """
    Mean and standard deviation over non-diverged trials of each metric's
    final-episode value.
    """
    finals = [t.records[-1] for t in result.trials if t.divergence is None and t.records]
    row = dict(cell)
    row["trials"] = len(result.trials)
    row["diverged"] = len(result.diverged)
    for metric in SUMMARY_METRICS:
        attr = "episode_return" if metric == "return" else metric
        values = np.array([getattr(r, attr) for r in finals], dtype=np.float64)
        row[f"{metric}_mean"] = float(values.mean()) if values.size else float("nan")
        row[f"{metric}_std"] = float(values.std()) if values.size else float("nan")
    return row


def summary_columns(grid: dict) -> list[str]:
    columns = list(grid) + ["trials", "diverged"]
    for metric in SUMMARY_METRICS:
        columns += [f"{metric}_mean", f"{metric}_std"]
    return columns


def sweep(
    config: ExperimentConfig, grid: dict, out_dir: str | Path | None = None, logger: logging.Logger | None = None
) -> list[dict]:
    """
    Run the experiment for every grid cell and summarise each cell.

    Each cell runs into out_dir/cell_<i>/; the summary goes to out_dir/sweep.csv.

    Returns:
        list[dict]: One summary row per cell, in grid_cells order.

    Raises:
        InvalidInputError: If the grid is empty.
        ConfigError: If a cell produces an invalid configuration.
    """
    cells = grid_cells(grid)
    rows = []
    diverged = 0
    for i, cell in enumerate(cells):
        cell_config = config.with_values(cell)
        if logger:
            logger.info(f"Sweep cell {i + 1}/{len(cells)}: {cell}")
        cell_dir = None if out_dir is None else Path(out_dir) / f"cell_{i:03d}"
        result = run_experiment(cell_config, cell_dir, logger)
        diverged += len(result.diverged)
        rows.append(summarize(cell, result))

    if out_dir is not None:
        tables.write_rows(Path(out_dir) / "sweep.csv", summary_columns(grid), rows)
    if logger:
        logger.info(f"Sweep finished: {len(cells)} cells, {diverged} diverged trials")
    return rows
