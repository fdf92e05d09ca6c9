"""Square roots of positive semidefinite matrices."""

import numpy as np
from scipy import linalg as la

from spectralloop.config import Settings, resolve
from spectralloop.errors import NegativeEigenvalue, NotHermitian
from spectralloop.linalg import operator_norm


def psd_sqrt(matrix: np.ndarray, settings: Settings | None = None) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [−τ, τ] are snapped to 0, where τ is the normality
    tolerance scaled to the matrix norm.

    Args:
        matrix: Hermitian matrix
        settings: Numerical settings

    Returns:
        The PSD square root

    Raises:
        NotHermitian: If ‖M − M*‖ exceeds the tolerance
        NegativeEigenvalue: If an eigenvalue is below −τ
    """
    settings = resolve(settings)
    matrix = np.asarray(matrix, dtype=complex)
    tol = settings.tolerance_for(operator_norm(matrix))
    residual = operator_norm(matrix - matrix.conj().T)
    if residual > tol:
        raise NotHermitian(residual)
    values, vectors = la.eigh((matrix + matrix.conj().T) / 2)
    if values.size and values[0] < -tol:
        raise NegativeEigenvalue(float(values[0]))
    roots = np.sqrt(np.where(values <= tol, 0.0, values))
    return (vectors * roots) @ vectors.conj().T
