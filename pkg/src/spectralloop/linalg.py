"""Small dense linear-algebra helpers shared across subpackages."""

import numpy as np
from scipy import linalg as la


def operator_norm(matrix: np.ndarray) -> float:
    """Largest singular value via the Hermitian eigenvalues of M*M."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    gram = matrix.conj().T @ matrix
    top = la.eigvalsh(gram, subset_by_index=[gram.shape[0] - 1, gram.shape[0] - 1])[0]
    return float(np.sqrt(max(top, 0.0)))


def operator_norms(stack: np.ndarray) -> np.ndarray:
    """Operator norms of a stack of matrices (leading axis is the batch)."""
    stack = np.asarray(stack)
    if stack.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.norm(stack, ord=2, axis=(-2, -1))


def unit(vector: np.ndarray) -> np.ndarray:
    """Return vector / ‖vector‖."""
    return vector / np.linalg.norm(vector)


def projector(vector: np.ndarray) -> np.ndarray:
    """Rank-one orthogonal projection onto span(vector) for a unit vector."""
    return np.outer(vector, vector.conj())


def complete_basis(columns: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal completion of ``columns`` against the canonical basis.

    Each round orthogonalizes every canonical vector e_k against the columns
    and the vectors accepted so far, and accepts the one with the largest
    remainder (lowest k on ties).

    Args:
        columns: dim × r matrix with orthonormal columns (r may be 0)
        dim: Ambient dimension

    Returns:
        dim × (dim − r) matrix with orthonormal columns spanning the complement
    """
    basis = np.zeros((dim, 0), dtype=complex) if columns.size == 0 else np.asarray(columns)
    needed = dim - basis.shape[1]
    if needed < 0:
        raise ValueError(f"{basis.shape[1]} columns do not fit in C^{dim}")
    extra = np.zeros((dim, needed), dtype=complex)
    for r in range(needed):
        current = np.concatenate([basis, extra[:, :r]], axis=1)
        candidates = np.eye(dim, dtype=complex)
        # two passes of Gram-Schmidt
        for _ in range(2):
            candidates = candidates - current @ (current.conj().T @ candidates)
        lengths = np.linalg.norm(candidates, axis=0)
        k = int(np.argmax(lengths))
        extra[:, r] = candidates[:, k] / lengths[k]
    return extra


def unitarity_defect(matrix: np.ndarray) -> float:
    """‖U*U − I‖ in operator norm."""
    eye = np.eye(matrix.shape[1])
    return operator_norm(matrix.conj().T @ matrix - eye)


def embed(matrix: np.ndarray, size: int) -> np.ndarray:
    """Zero-pad a square matrix into the top-left corner of a size × size one."""
    if matrix.shape[0] == size:
        return np.array(matrix, dtype=complex)
    out = np.zeros((size, size), dtype=complex)
    out[: matrix.shape[0], : matrix.shape[1]] = matrix
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = la.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
