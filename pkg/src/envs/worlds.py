"""
Benchmark MDPs: chain, grid worlds (including the two-room layout) and
random MDPs. All discrete worlds are deterministic apart from random_mdp.
"""

from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..utils.errors import ConstructionError
from .mdp import MdpModel

LAYOUTS = Path(__file__).parent / "layouts"

LEFT, RIGHT = 0, 1
NORTH, SOUTH, EAST, WEST = 0, 1, 2, 3
MOVES = {NORTH: (-1, 0), SOUTH: (1, 0), EAST: (0, 1), WEST: (0, -1)}
OPEN_GRID_GOAL = (0, 0)


def chain_mdp(n: int, gamma: float) -> MdpModel:
    """
    n-state chain with actions LEFT (0) and RIGHT (1).

    Moves are deterministic and blocked at both ends. Every action taken in
    the rightmost state earns reward 1; all other rewards are 0. There are no
    terminal states.
    """
    if n < 1:
        raise ConstructionError(f"chain needs n >= 1, got {n}")
    P = np.zeros((2, n, n))
    for s in range(n):
        P[LEFT, s, max(s - 1, 0)] = 1.0
        P[RIGHT, s, min(s + 1, n - 1)] = 1.0
    R = np.zeros((2, n))
    R[:, n - 1] = 1.0
    return MdpModel(P, R, gamma, cells=[(0, s) for s in range(n)], shape=(1, n), name=f"chain{n}")


def _check_connected(free: list, index: dict) -> None:
    n = len(free)
    A = np.zeros((n, n), dtype=bool)
    for i, (r, c) in enumerate(free):
        for dr, dc in MOVES.values():
            j = index.get((r + dr, c + dc))
            if j is not None:
                A[i, j] = True
    n_components, labels = connected_components(A, directed=False)
    if n_components > 1:
        groups = [[free[i] for i in np.flatnonzero(labels == k)] for k in range(n_components)]
        smallest = min(groups, key=len)
        raise ConstructionError(f"free cells split into {n_components} regions; e.g. cut off: {smallest}")


def grid_world(width: int, height: int, walls, goal, gamma: float) -> MdpModel:
    """
    Deterministic grid world with actions N, S, E, W.

    States are the free cells in row-major order. Moving into a wall or the
    boundary leaves the state unchanged. Entering the goal earns reward 1;
    the goal is absorbing with reward 0 and ends episodes.

    Args:
        width (int): Number of columns.
        height (int): Number of rows.
        walls: Iterable of (row, col) wall cells.
        goal (tuple): (row, col) goal cell.
        gamma (float): Discount factor.

    Raises:
        ConstructionError: Goal on a wall or outside the grid, or free cells
            not connected.
    """
    walls = {tuple(w) for w in walls}
    goal = tuple(goal)
    if not (0 <= goal[0] < height and 0 <= goal[1] < width):
        raise ConstructionError(f"goal {goal} lies outside the {height}x{width} grid")
    if goal in walls:
        raise ConstructionError(f"goal {goal} lies inside a wall")

    free = [(r, c) for r in range(height) for c in range(width) if (r, c) not in walls]
    index = {cell: i for i, cell in enumerate(free)}
    _check_connected(free, index)

    n = len(free)
    g = index[goal]
    P = np.zeros((4, n, n))
    R = np.zeros((4, n))
    for i, (r, c) in enumerate(free):
        for a, (dr, dc) in MOVES.items():
            if i == g:
                P[a, i, i] = 1.0
                continue
            j = index.get((r + dr, c + dc), i)
            P[a, i, j] = 1.0
            if j == g:
                R[a, i] = 1.0
    terminal = np.zeros(n, dtype=bool)
    terminal[g] = True
    return MdpModel(P, R, gamma, terminal, cells=free, shape=(height, width), name=f"grid{height}x{width}")


def open_grid(width: int, height: int, gamma: float, goal=OPEN_GRID_GOAL) -> MdpModel:
    """Wall-free grid world; the goal defaults to the upper-left cell."""
    return grid_world(width, height, set(), goal, gamma)


def parse_ascii_map(text: str) -> tuple[int, int, set, tuple]:
    """
    Read an ASCII grid: `#` wall, `.` free, `G` goal (exactly one).

    Returns:
        tuple: (width, height, walls, goal).
    """
    rows = [line.rstrip("\n") for line in text.splitlines() if line.strip() and not line.startswith(";")]
    if not rows:
        raise ConstructionError("empty grid map")
    width = max(len(row) for row in rows)
    walls, goals = set(), []
    for r, row in enumerate(rows):
        for c, ch in enumerate(row.ljust(width, "#")):
            if ch == "#":
                walls.add((r, c))
            elif ch == "G":
                goals.append((r, c))
            elif ch != ".":
                raise ConstructionError(f"unexpected character {ch!r} at row {r}, col {c}")
    if len(goals) != 1:
        raise ConstructionError(f"grid map needs exactly one goal, found {len(goals)}")
    return width, len(rows), walls, goals[0]


def grid_from_ascii(text: str, gamma: float) -> MdpModel:
    """Grid world from an ASCII map (see parse_ascii_map)."""
    width, height, walls, goal = parse_ascii_map(text)
    return grid_world(width, height, walls, goal, gamma)


def load_grid(path: str | Path, gamma: float) -> MdpModel:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Grid map not found: {path}")
    return grid_from_ascii(path.read_text(encoding="utf-8"), gamma)


def two_room_world(gamma: float) -> MdpModel:
    """
    Two 10x5 rooms side by side, joined by a one-cell doorway in the dividing
    wall, goal in the top-right corner of the second room (101 free cells).
    The layout lives in layouts/two_room.txt.
    """
    m = load_grid(LAYOUTS / "two_room.txt", gamma)
    return MdpModel(m.P, m.R, m.gamma, m.terminal, m.cells, m.shape, name="two_room")


def random_mdp(n_states: int, n_actions: int, gamma: float, seed: int) -> MdpModel:
    """
    Dense random MDP: Dirichlet(1) transition rows and rewards uniform on [0, 1].
    """
    if n_states < 1 or n_actions < 1:
        raise ConstructionError("random MDP needs at least one state and one action")
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.ones(n_states), size=(n_actions, n_states))
    # Renormalise so rows sum to 1 to the last bit
    P /= P.sum(axis=2, keepdims=True)
    R = rng.uniform(0.0, 1.0, size=(n_actions, n_states))
    return MdpModel(P, R, gamma, name=f"random{n_states}")
