from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .utils.errors import InvalidInputError

PANELS = ("learning_curve", "weight_delta", "bellman_error", "sparsity", "heatmap")

# Fixed SVG ids and no timestamp, so equal inputs give identical files
SVG_RC = {"svg.hashsalt": "mdtd", "svg.fonttype": "path"}


def _save(fig, filename) -> None:
    filename = str(filename)
    if filename.endswith(".svg"):
        with matplotlib.rc_context(SVG_RC):
            fig.savefig(filename, format="svg", metadata={"Date": None})
    else:
        fig.savefig(filename, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def _by_episode(records, column: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean and standard deviation of a column over trials, per episode."""
    episodes = sorted({r.episode for r in records})
    mean, std = [], []
    for k in episodes:
        values = np.array([getattr(r, column) for r in records if r.episode == k], dtype=np.float64)
        mean.append(values.mean())
        std.append(values.std())
    return np.array(episodes), np.array(mean), np.array(std)


def _curve(records, columns, labels, ylabel, filename, log_scale=False) -> None:
    fig, ax = plt.subplots()
    for column, label in zip(columns, labels):
        x, mean, std = _by_episode(records, column)
        ax.plot(x, mean, label=label)
        ax.fill_between(x, mean - std, mean + std, alpha=0.2)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("episode")
    ax.set_ylabel(ylabel)
    if len(columns) > 1:
        ax.legend()
    _save(fig, filename)


def plot_learning_curve(records, filename) -> None:
    """Steps per episode, mean over trials with a +-1 std band."""
    _curve(records, ["steps"], ["steps"], "steps per episode", filename)


def plot_weight_delta(records, filename) -> None:
    """l2 and l-infinity norms of the change in w between successive episodes."""
    _curve(records, ["delta_l2", "delta_linf"], ["||dw||_2", "||dw||_inf"], "weight change", filename)


def plot_bellman_error(records, filename) -> None:
    _curve(records, ["bellman_error"], ["Bellman error"], "Bellman error", filename, log_scale=True)


def plot_sparsity(records, filename) -> None:
    _curve(records, ["nnz"], ["nonzero weights"], "nonzero weights", filename)


def draw_value_heatmap(ax, m, values, vmin=None, vmax=None) -> int:
    """
    Draw one square per free cell of a grid MDP, colored by its value.

    Args:
        ax: Matplotlib axes.
        m (MdpModel): Grid MDP with a cell layout.
        values (np.ndarray): One value per state.

    Returns:
        int: Number of cells drawn (the number of free cells).

    Raises:
        InvalidInputError: If the MDP has no grid layout or values has the wrong length.
    """
    if not m.cells or not m.shape:
        raise InvalidInputError(f"heat maps need a grid environment; {m.name} has no cell layout")
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (m.n_states,):
        raise InvalidInputError(f"need {m.n_states} values, got shape {values.shape}")

    vmin = values.min() if vmin is None else vmin
    vmax = values.max() if vmax is None else vmax
    norm = matplotlib.colors.Normalize(vmin=vmin, vmax=vmax if vmax > vmin else vmin + 1.0)
    cmap = plt.cm.viridis

    sm = plt.cm.ScalarMappable(cmap=cmap, norm=norm)
    sm.set_array([])
    cbar = plt.colorbar(sm, ax=ax)
    cbar.set_label("value")

    height, width = m.shape
    for state, (row, col) in enumerate(m.cells):
        # Row 0 is drawn at the top
        ax.add_patch(plt.Rectangle((col, height - 1 - row), 1.0, 1.0, color=cmap(norm(values[state]))))
    ax.set_xlim(0, width)
    ax.set_ylim(0, height)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    return len(m.cells)


def plot_value_heatmap(m, values, filename, title=None, vmin=None, vmax=None) -> int:
    fig, ax = plt.subplots()
    count = draw_value_heatmap(ax, m, values, vmin, vmax)
    if title:
        ax.set_title(title)
    _save(fig, filename)
    return count


def emit_plots(records, panels, out_dir, m=None, values=None) -> list[Path]:
    """
    Write one SVG per requested panel.

    Args:
        records: RunRecord rows (at least one).
        panels: Panel names from PANELS.
        out_dir: Output folder.
        m (MdpModel, optional): Grid MDP, needed for "heatmap".
        values (np.ndarray, optional): Value per state, needed for "heatmap".

    Returns:
        list[Path]: Written files, in panel order.

    Raises:
        InvalidInputError: Empty table, empty or unknown panel request, or a
            heat map without a grid environment.
    """
    records = list(records)
    panels = list(panels)
    if not records:
        raise InvalidInputError("cannot plot an empty table")
    if not panels:
        raise InvalidInputError("no panels requested")
    unknown = [p for p in panels if p not in PANELS]
    if unknown:
        raise InvalidInputError(f"unknown panel(s) {unknown}; choose from {', '.join(PANELS)}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for panel in panels:
        filename = out_dir / f"{panel}.svg"
        if panel == "learning_curve":
            plot_learning_curve(records, filename)
        elif panel == "weight_delta":
            plot_weight_delta(records, filename)
        elif panel == "bellman_error":
            plot_bellman_error(records, filename)
        elif panel == "sparsity":
            plot_sparsity(records, filename)
        else:
            if m is None or values is None:
                raise InvalidInputError("heat maps need a grid environment and a value per state")
            plot_value_heatmap(m, values, filename)
        written.append(filename)
    return written
