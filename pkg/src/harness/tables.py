"""
CSV tables: header row, `.` decimal separator, floats written with repr so
they read back bit for bit.
"""

import csv
from pathlib import Path

from ..analysis.metrics import RUN_COLUMNS, RunRecord

TIMING_COLUMNS = ("trial", "episode", "wall_clock_per_step")
STORED_RUN_COLUMNS = tuple(c for c in RUN_COLUMNS if c != "wall_clock_per_step")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows(path: str | Path, columns, rows) -> None:
    """Write dict rows with a fixed column order."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row[c]) for c in columns])


def read_rows(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Table not found: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def sort_records(records) -> list[RunRecord]:
    return sorted(records, key=lambda r: (r.trial, r.episode))


def write_records(folder: str | Path, records) -> None:
    """
    Write runs.csv (every column except timing) and timing.csv.

    Rows are sorted by (trial, episode) first.
    """
    folder = Path(folder)
    rows = [r.to_row() for r in sort_records(records)]
    write_rows(folder / "runs.csv", STORED_RUN_COLUMNS, rows)
    write_rows(folder / "timing.csv", TIMING_COLUMNS, rows)


def read_records(path: str | Path) -> list[RunRecord]:
    """
    Read runs.csv; wall_clock_per_step is joined from timing.csv next to it when present.
    """
    path = Path(path)
    rows = read_rows(path)
    timing_path = path.parent / "timing.csv"
    if timing_path.exists():
        timing = {(t["trial"], t["episode"]): t["wall_clock_per_step"] for t in read_rows(timing_path)}
        for row in rows:
            row["wall_clock_per_step"] = timing.get((row["trial"], row["episode"]))
    return [RunRecord.from_row(row) for row in rows]
