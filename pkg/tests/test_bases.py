"""
Tests for feature bases, proto-value functions and the basis text format.
"""

import numpy as np
import pytest

from src.basis.bases import (
    StateActionBasis,
    fourier_basis,
    noisy_augment,
    polynomial_basis,
    rbf_grid,
    tabular_basis,
)
from src.basis.io import basis_from_text, basis_to_text, load_basis, save_basis
from src.basis.pvf import graph_laplacian, pvf_basis
from src.envs.worlds import chain_mdp, grid_world
from src.utils.errors import ConstructionError, InvalidInputError, InvalidStateError

MOUNTAIN_CAR_BOUNDS = [[-1.2, 0.6], [-0.07, 0.07]]


def path_adjacency(n):
    """
    Adjacency matrix of an n-node path graph.

    Parameters:
    n (int): Number of nodes.

    Returns:
    np.ndarray: Symmetric 0/1 matrix with ones on the first off-diagonals.
    """
    A = np.zeros((n, n))
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = 1.0
    return A


def test_tabular_basis_is_one_hot():
    """
    Verify tabular features are indicator vectors and the matrix is the identity.
    """
    basis = tabular_basis(4)
    assert np.array_equal(basis.evaluate(2), [0.0, 0.0, 1.0, 0.0])
    assert np.array_equal(basis.matrix(), np.eye(4))


def test_tabular_basis_rejects_bad_states():
    """
    Verify out-of-range and non-integer states are rejected.
    """
    basis = tabular_basis(3)
    with pytest.raises(InvalidStateError):
        basis.evaluate(3)
    with pytest.raises(InvalidStateError):
        basis.evaluate(1.5)


def test_fourier_basis_size_and_origin():
    """
    Verify an order-4 basis on a 2-D box has 25 features, all equal to 1 at the lower corner.
    """
    basis = fourier_basis(4, MOUNTAIN_CAR_BOUNDS)
    assert basis.d == 25
    assert np.allclose(basis.evaluate([-1.2, -0.07]), np.ones(25))


def test_fourier_basis_clamps_out_of_bounds_states():
    """
    Verify states outside the bounds are evaluated at the nearest boundary point.
    """
    basis = fourier_basis(3, MOUNTAIN_CAR_BOUNDS)
    assert basis.out_of_bounds([-2.0, 0.0])
    assert np.array_equal(basis.evaluate([-2.0, 0.0]), basis.evaluate([-1.2, 0.0]))


def test_polynomial_and_rbf_bases():
    """
    Verify feature counts of the polynomial and RBF constructions and the RBF peak at its center.
    """
    assert polynomial_basis(2, MOUNTAIN_CAR_BOUNDS).d == 9
    rbf = rbf_grid(3, [[0.0, 1.0]])
    assert rbf.d == 3
    assert rbf.evaluate([0.5])[1] == pytest.approx(1.0)


def test_noisy_augment_appends_frozen_noise():
    """
    Verify noise augmentation keeps the base columns, appends n columns and is seeded.
    """
    base = tabular_basis(5)
    noisy = noisy_augment(base, 7, seed=11)
    again = noisy_augment(base, 7, seed=11)
    assert noisy.d == 12
    assert np.array_equal(noisy.matrix()[:, :5], np.eye(5))
    assert np.array_equal(noisy.matrix(), again.matrix())
    assert noisy_augment(base, 0, seed=1) is base
    with pytest.raises(InvalidInputError):
        noisy_augment(base, -1, seed=1)


def test_state_action_basis_blocks():
    """
    Verify phi(s, a) places the state features in block a and action_values
    equals the row-wise product with the weights.
    """
    sa = StateActionBasis(tabular_basis(3), 2)
    assert sa.d == 6
    assert np.array_equal(sa.evaluate(1, 1), [0, 0, 0, 0, 1, 0])
    w = np.arange(6, dtype=float)
    assert np.allclose(sa.action_values(1, w), sa.action_matrix(1) @ w)


def test_graph_laplacian_rows_sum_to_zero():
    """
    Verify the combinatorial Laplacian has zero row sums.
    """
    L = graph_laplacian(path_adjacency(6))
    assert np.allclose(L.sum(axis=1), 0.0)


def test_pvf_basis_on_path_graph():
    """
    Verify PVFs are orthonormal, eigenvalues ascend from 0 and the first vector is constant.
    """
    basis = pvf_basis(path_adjacency(10), 4)
    phi = basis.matrix()
    assert phi.shape == (10, 4)
    assert np.allclose(phi.T @ phi, np.eye(4), atol=1e-10)
    assert basis.eigenvalues[0] == pytest.approx(0.0, abs=1e-10)
    assert np.all(np.diff(basis.eigenvalues) >= -1e-12)
    assert np.allclose(phi[:, 0], 1.0 / np.sqrt(10))


def test_pvf_basis_from_grid_world_graph():
    """
    Verify a 10x10 grid yields 50 PVF columns of length 100.
    """
    m = grid_world(10, 10, set(), (0, 9), 0.9)
    assert pvf_basis(m.adjacency(), 50).matrix().shape == (100, 50)


def test_pvf_basis_errors():
    """
    Verify disconnected graphs and out-of-range k are rejected.

    Raises:
    ConstructionError: For a disconnected graph.
    InvalidInputError: For k larger than the number of states.
    """
    A = path_adjacency(4)
    A[1, 2] = A[2, 1] = 0.0
    with pytest.raises(ConstructionError):
        pvf_basis(A, 2)
    with pytest.raises(InvalidInputError):
        pvf_basis(path_adjacency(4), 5)


def test_basis_text_format(tmp_path):
    """
    Verify a PVF basis and a Fourier basis survive save/load with identical features.
    """
    pvf = pvf_basis(chain_mdp(6, 0.9).adjacency(), 3)
    path = tmp_path / "pvf.txt"
    save_basis(pvf, path)
    loaded = load_basis(path)
    assert loaded.kind == "pvf"
    assert np.array_equal(loaded.matrix(), pvf.matrix())

    fourier = fourier_basis(2, MOUNTAIN_CAR_BOUNDS)
    rebuilt = basis_from_text(basis_to_text(fourier))
    assert np.array_equal(rebuilt.evaluate([0.1, 0.01]), fourier.evaluate([0.1, 0.01]))


def test_load_basis_missing_file(tmp_path):
    """
    Verify a missing basis file raises FileNotFoundError.
    """
    with pytest.raises(FileNotFoundError):
        load_basis(tmp_path / "nope.txt")
