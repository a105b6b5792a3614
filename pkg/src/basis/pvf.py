"""
Proto-value functions: low-order eigenvectors of a state-graph Laplacian.
"""

import numpy as np
from scipy.linalg import eigh
from scipy.sparse.csgraph import connected_components

from ..utils.errors import ConstructionError, InvalidInputError
from .bases import MatrixBasis


def graph_laplacian(adjacency, normalized: bool = False) -> np.ndarray:
    """
    Laplacian of a weighted undirected graph.

    Combinatorial: L = D - A.  Normalized: I - D^{-1/2} A D^{-1/2}.

    Args:
        adjacency: Symmetric nonnegative matrix with zero diagonal.
        normalized (bool): Return the normalized Laplacian instead.
    """
    A = np.asarray(adjacency, dtype=np.float64)
    degrees = A.sum(axis=1)
    if not normalized:
        return np.diag(degrees) - A
    # Isolated nodes keep a zero row (single-state graphs)
    inv_sqrt = np.zeros_like(degrees)
    np.divide(1.0, np.sqrt(degrees), out=inv_sqrt, where=degrees > 0)
    return np.eye(A.shape[0]) - inv_sqrt[:, np.newaxis] * A * inv_sqrt[np.newaxis, :]


def _check_adjacency(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InvalidInputError(f"adjacency must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)) or np.any(A < 0):
        raise InvalidInputError("adjacency must be finite and nonnegative")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12):
        raise InvalidInputError("adjacency must be symmetric")
    if np.any(np.diag(A) != 0):
        raise InvalidInputError("adjacency must have a zero diagonal")


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry (first on ties) is positive."""
    vectors = vectors.copy()
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


class PVFBasis(MatrixBasis):
    """
    Matrix basis whose columns are Laplacian eigenvectors.

    Attributes:
        eigenvalues (np.ndarray): The k smallest eigenvalues, ascending.
        normalized (bool): Whether the normalized Laplacian was used.
    """

    kind = "pvf"

    def __init__(self, vectors: np.ndarray, eigenvalues: np.ndarray, normalized: bool):
        super().__init__(vectors)
        self.eigenvalues = np.array(eigenvalues, dtype=np.float64)
        self.eigenvalues.setflags(write=False)
        self.normalized = normalized

    def params(self) -> dict:
        return {"normalized": self.normalized, "eigenvalues": self.eigenvalues.tolist()}


def pvf_basis(adjacency, k: int, normalized: bool = False) -> PVFBasis:
    """
    Build k proto-value functions from a state graph.

    Columns are the unit-norm eigenvectors of the Laplacian with the k smallest
    eigenvalues, sign-fixed so their largest-magnitude entry is positive.

    Args:
        adjacency: Symmetric nonnegative matrix with zero diagonal.
        k (int): Number of eigenvectors, 1 <= k <= number of states.
        normalized (bool): Use the normalized Laplacian. Default combinatorial.

    Raises:
        InvalidInputError: Malformed adjacency or k out of range.
        ConstructionError: The graph is disconnected.
    """
    A = np.asarray(adjacency, dtype=np.float64)
    _check_adjacency(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must be in [1, {n}], got {k}")

    n_components, labels = connected_components(A > 0, directed=False)
    if n_components > 1:
        components = [np.flatnonzero(labels == c).tolist() for c in range(n_components)]
        raise ConstructionError(f"state graph is disconnected into {n_components} components: {components}")

    L = graph_laplacian(A, normalized=normalized)
    eigenvalues, vectors = eigh(L, subset_by_index=[0, k - 1])
    return PVFBasis(fix_signs(vectors), eigenvalues, normalized)
