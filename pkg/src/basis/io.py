"""
Plain-text format for feature bases.

    # feature basis
    kind = "fourier"
    d = 25
    order = 4
    bounds = [[-1.2, 0.6], [-0.07, 0.07]]
    rows = 0

Header lines use the config `key = value` syntax. Matrix-backed bases
(pvf, noisy, matrix) set `rows = n` and append n lines of d
space-separated floats, written with round-trip precision.
"""

from pathlib import Path

import numpy as np

from ..config import format_value, read_key_values
from ..utils.errors import InvalidInputError
from .bases import (
    FeatureBasis,
    FourierBasis,
    MatrixBasis,
    PolynomialBasis,
    RBFBasis,
    TabularBasis,
)
from .pvf import PVFBasis

_MATRIX_KINDS = ("pvf", "noisy", "matrix")


def basis_to_text(basis: FeatureBasis) -> str:
    """Serialize a basis to the text format."""
    lines = ["# feature basis", f"kind = {format_value(basis.kind)}", f"d = {basis.d}"]
    lines += [f"{key} = {format_value(value)}" for key, value in basis.params().items()]
    if basis.kind in _MATRIX_KINDS:
        phi = basis.matrix()
        lines.append(f"rows = {phi.shape[0]}")
        lines += [" ".join(repr(float(x)) for x in row) for row in phi]
    else:
        lines.append("rows = 0")
    return "\n".join(lines) + "\n"


def basis_from_text(text: str) -> FeatureBasis:
    """
    Rebuild a basis from the text format.

    Noise-augmented bases come back as plain matrix bases with identical values.

    Raises:
        InvalidInputError: Unknown kind, malformed rows or a d mismatch.
    """
    all_lines = text.splitlines()
    try:
        split = next(i for i, line in enumerate(all_lines) if line.strip().startswith("rows"))
    except StopIteration:
        raise InvalidInputError("basis text has no `rows` line")
    header = {key: value for _, key, value in read_key_values("\n".join(all_lines[:split + 1]))}
    kind = header.get("kind")
    n_rows = int(header.get("rows", 0))

    if kind == "tabular":
        basis = TabularBasis(header["n_states"])
    elif kind == "fourier":
        basis = FourierBasis(header["order"], header["bounds"])
    elif kind == "polynomial":
        basis = PolynomialBasis(header["degree"], header["bounds"])
    elif kind == "rbf":
        basis = RBFBasis(header["centers"], header["widths"], header["bounds"])
    elif kind in _MATRIX_KINDS:
        rows = [line for line in all_lines[split + 1:] if line.strip()]
        if len(rows) != n_rows:
            raise InvalidInputError(f"expected {n_rows} matrix rows, found {len(rows)}")
        phi = np.array([[float(x) for x in row.split()] for row in rows])
        if kind == "pvf":
            basis = PVFBasis(phi, header["eigenvalues"], header["normalized"])
        else:
            basis = MatrixBasis(phi)
    else:
        raise InvalidInputError(f"unknown basis kind {kind!r}")

    if basis.d != header.get("d"):
        raise InvalidInputError(f"header says d = {header.get('d')}, rebuilt basis has d = {basis.d}")
    return basis


def save_basis(basis: FeatureBasis, path: str | Path) -> None:
    Path(path).write_text(basis_to_text(basis), encoding="utf-8")


def load_basis(path: str | Path) -> FeatureBasis:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Basis file not found: {path}")
    return basis_from_text(path.read_text(encoding="utf-8"))
