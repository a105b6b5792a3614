"""
Tests for the command-line entry point.

Each subcommand is driven through main(argv) with result folders under
tmp_path; exit codes and the files each command writes are checked.
"""

import pytest

from src.main import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, main, prepare_result_folder

CHAIN = """
env = "chain"
nStates = 4
basis = "tabular"
learner = "sparse_td"
episodes = 3
maxSteps = 10
trials = 2
logName = "run"
"""

GRID = """
env = "grid"
gridWidth = 3
gridHeight = 3
basis = "tabular"
learner = "td"
episodes = 2
maxSteps = 20
"""


def write_config(folder, name, content):
    """
    Write a configuration file.

    Parameters:
    folder (pathlib.Path): Target folder.
    name (str): File name.
    content (str): Configuration text.

    Returns:
    pathlib.Path: The written file.
    """
    p = folder / name
    p.write_text(content, encoding="utf-8")
    return p


def test_run_writes_tables_plots_and_log(tmp_path):
    """
    Verify `run` exits 0 and writes the tables, the default panels and the log file.
    """
    cfg = write_config(tmp_path, "chain.toml", CHAIN)
    out = tmp_path / "out"
    assert main(["run", "-c", str(cfg), "--out", str(out)]) == EXIT_OK
    for name in ("runs.csv", "timing.csv", "resolved.toml", "run.log", "learning_curve.svg", "bellman_error.svg"):
        assert (out / name).exists(), name
    assert not (out / "heatmap.svg").exists()
    assert "Experiment started." in (out / "run.log").read_text(encoding="utf-8")


def test_run_reports_config_errors(tmp_path, capsys):
    """
    Verify an invalid or missing config exits 1 with the error on stderr.
    """
    cfg = write_config(tmp_path, "bad.toml", CHAIN + "gamma = 1.0\n")
    assert main(["run", "-c", str(cfg), "--out", str(tmp_path / "out")]) == EXIT_CONFIG
    assert "gamma" in capsys.readouterr().err
    assert main(["run", "-c", str(tmp_path / "missing.toml")]) == EXIT_CONFIG


def test_run_reports_invalid_basis_size(tmp_path, capsys):
    """
    Verify a basis that cannot be built from the config exits 1 instead of raising.
    """
    content = CHAIN.replace('basis = "tabular"', 'basis = "pvf"\nbasisSize = 10')
    cfg = write_config(tmp_path, "pvf.toml", content)
    assert main(["run", "-c", str(cfg), "--out", str(tmp_path / "out")]) == EXIT_CONFIG
    assert "basis=pvf" in capsys.readouterr().err


def test_solve_exact_grid_goal_is_upper_left(capsys):
    """
    Verify the default grid puts its goal in state 0: V* is 0 there and largest next to it.
    """
    argv = ["solve-exact", "--env", "grid", "--gamma", "0.9", "--width", "3", "--height", "3"]
    assert main(argv) == EXIT_OK
    rows = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()[1:]]
    v_star = [float(row[1]) for row in rows]
    assert v_star[0] == 0.0
    assert v_star[1] == pytest.approx(1.0)
    assert v_star[8] == pytest.approx(0.9**3)


def test_run_refuses_non_result_folder(tmp_path):
    """
    Verify results are never written into a non-empty folder that holds other files.
    """
    cfg = write_config(tmp_path, "chain.toml", CHAIN)
    other = tmp_path / "other"
    other.mkdir()
    (other / "notes.txt").write_text("keep", encoding="utf-8")
    assert main(["run", "-c", str(cfg), "--out", str(other)]) == EXIT_CONFIG
    with pytest.raises(FileExistsError):
        prepare_result_folder(other)


def test_run_diverged_exit_code(tmp_path):
    """
    Verify a run whose trials all diverge exits 2.
    """
    content = CHAIN.replace("sparse_td", "td") + "alpha0 = 0.5\ndivergenceLimit = 0.1\n"
    cfg = write_config(tmp_path, "diverge.toml", content)
    assert main(["run", "-c", str(cfg), "--out", str(tmp_path / "out")]) == EXIT_DIVERGED


def test_run_find_all(tmp_path):
    """
    Verify batch mode runs every config in the folder into its own result folder.
    """
    configs = tmp_path / "configs"
    configs.mkdir()
    write_config(configs, "a.toml", CHAIN)
    write_config(configs, "b.toml", CHAIN.replace("sparse_td", "composite_td"))
    out = tmp_path / "out"
    assert main(["run", "--find", "all", "-f", str(configs), "--out", str(out)]) == EXIT_OK
    assert (out / "a" / "runs.csv").exists()
    assert (out / "b" / "runs.csv").exists()


def test_sweep_command(tmp_path):
    """
    Verify `sweep` writes the summary table.
    """
    cfg = write_config(tmp_path, "chain.toml", CHAIN)
    grid = write_config(tmp_path, "grid.toml", "beta = [0.0, 0.01]\n")
    out = tmp_path / "sweep"
    assert main(["sweep", "-c", str(cfg), "--grid", str(grid), "--out", str(out)]) == EXIT_OK
    assert len((out / "sweep.csv").read_text(encoding="utf-8").splitlines()) == 3


def test_solve_exact_chain(capsys):
    """
    Verify the chain oracle prints V*(s) = 0.5^(4 - s) / 0.5 and action RIGHT everywhere.
    """
    assert main(["solve-exact", "--env", "chain", "--gamma", "0.5", "--n-states", "5"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "state,v_star,v_pi,greedy_action"
    assert len(lines) == 6
    for s, line in enumerate(lines[1:]):
        state, v_star, v_pi, action = line.split(",")
        assert int(state) == s
        assert float(v_star) == pytest.approx(0.5 ** (4 - s) / 0.5)
        assert float(v_pi) == pytest.approx(float(v_star))
        assert action == "1"


def test_check_command(tmp_path):
    """
    Verify `check` exits 0 for the geometry suite and writes its table.
    """
    assert main(["check", "--suite", "geometry", "--out", str(tmp_path)]) == EXIT_OK
    assert EXIT_CHECK_FAILED == 3
    text = (tmp_path / "check_geometry.csv").read_text(encoding="utf-8")
    assert text.startswith("suite,name,value,threshold,passed")
    assert "false" not in text


def test_plot_command_with_heatmap(tmp_path, capsys):
    """
    Verify `plot` redraws panels from a result folder, including the heat map.
    """
    cfg = write_config(tmp_path, "grid.toml", GRID)
    out = tmp_path / "out"
    assert main(["run", "-c", str(cfg), "--out", str(out)]) == EXIT_OK
    assert (out / "heatmap.svg").exists()

    plots = tmp_path / "plots"
    argv = ["plot", "--table", str(out / "runs.csv"), "--panel", "sparsity", "--panel", "heatmap", "--out", str(plots)]
    assert main(argv) == EXIT_OK
    assert (plots / "sparsity.svg").exists()
    assert (plots / "heatmap.svg").exists()
    assert "Wrote" in capsys.readouterr().out


def test_unknown_subcommand_exits():
    """
    Verify argparse rejects an unknown subcommand.
    """
    with pytest.raises(SystemExit):
        main(["train"])
