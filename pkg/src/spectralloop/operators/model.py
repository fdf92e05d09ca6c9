"""Discretized operator-valued paths and loops.

A path is the grid of matrices M_g = Ā(g/G), g = 0..G, of a normal
compact-operator-valued function, represented by a finite window plus a
declared norm bound for the discarded tail.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.errors import NotALoop, NotNormal, SizeMismatch
from spectralloop.linalg import operator_norm, operator_norms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorSample:
    """One validated sample of a path.

    Attributes:
        matrix: The square complex matrix (read-only)
        normality_residual: ‖MM* − M*M‖
        norm: ‖M‖
    """

    matrix: np.ndarray
    normality_residual: float
    norm: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def normality_residual(matrix: np.ndarray) -> float:
    """‖MM* − M*M‖ in operator norm."""
    adj = matrix.conj().T
    return operator_norm(matrix @ adj - adj @ matrix)


def _as_matrix(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix has non-finite entries")
    return arr


def validate_sample(
    matrix, tol: float | None = None, settings: Settings | None = None
) -> OperatorSample:
    """Check that a matrix is normal and wrap it as a sample.

    Args:
        matrix: Square matrix with finite entries
        tol: Absolute tolerance on ‖MM* − M*M‖; defaults to
            normality_tol · max(‖M‖², 1)
        settings: Numerical settings

    Returns:
        The validated sample

    Raises:
        ValueError: If the matrix is not square or not finite
        NotNormal: If the normality residual exceeds the tolerance
    """
    arr = _as_matrix(matrix)
    norm = operator_norm(arr)
    if tol is None:
        tol = resolve(settings).tolerance_for(norm)
    residual = normality_residual(arr)
    if residual > tol:
        raise NotNormal(residual, tol)
    arr.setflags(write=False)
    return OperatorSample(arr, residual, norm)


@dataclass(frozen=True)
class OperatorPath:
    """Samples of a matrix-valued function on the uniform grid x_g = g/G.

    Attributes:
        matrices: Array of shape (G + 1, dim, dim), read-only
        is_loop: Whether samples[0] = samples[G] is part of the model
        tail_bound: Declared norm of the discarded compact tail
        residuals: Normality residual of each sample
    """

    matrices: np.ndarray
    is_loop: bool
    tail_bound: float
    residuals: np.ndarray

    @property
    def grid_size(self) -> int:
        return self.matrices.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid_size + 1) / self.grid_size

    @property
    def samples(self) -> list[OperatorSample]:
        norms = operator_norms(self.matrices)
        return [
            OperatorSample(m, float(r), float(nrm))
            for m, r, nrm in zip(self.matrices, self.residuals, norms, strict=True)
        ]

    @property
    def gaps(self) -> np.ndarray:
        """Adjacent-sample norm gaps ‖M_{g+1} − M_g‖ (continuity modulus)."""
        return operator_norms(np.diff(self.matrices, axis=0))

    @property
    def norm(self) -> float:
        """max_g ‖M_g‖."""
        return float(np.max(operator_norms(self.matrices)))

    def closure_defect(self) -> float:
        return operator_norm(self.matrices[-1] - self.matrices[0])

    @classmethod
    def from_matrices(
        cls,
        matrices,
        is_loop: bool | None = None,
        tail_bound: float = 0.0,
        settings: Settings | None = None,
        validate: bool = True,
    ) -> "OperatorPath":
        """Build a path from a stack of samples.

        Args:
            matrices: Sequence of G + 1 square matrices of equal size
            is_loop: Require (True), forbid (False) or detect (None) loop closure
            tail_bound: Declared norm of the discarded tail
            settings: Numerical settings
            validate: Check normality of every sample

        Returns:
            The path

        Raises:
            ValueError: On fewer than three samples or a negative tail bound
            SizeMismatch: If samples differ in size
            NotNormal: If a sample fails validation (with its grid index)
            NotALoop: If is_loop is True but the endpoints differ
        """
        settings = resolve(settings)
        mats = [np.asarray(m, dtype=complex) for m in matrices]
        if len(mats) < 3:
            raise ValueError(f"A path needs at least 3 samples (G >= 2), got {len(mats)}")
        if tail_bound < 0:
            raise ValueError(f"tail_bound must be nonnegative, got {tail_bound}")
        dim = mats[0].shape[0]
        for m in mats:
            if m.shape != (dim, dim):
                raise SizeMismatch(dim, m.shape[0])
        stack = np.stack(mats)
        if not np.all(np.isfinite(stack)):
            raise ValueError("Path has non-finite entries")

        residuals = np.empty(len(mats))
        for g, m in enumerate(stack):
            residuals[g] = normality_residual(m)
            if validate:
                tol = settings.tolerance_for(operator_norm(m))
                if residuals[g] > tol:
                    raise NotNormal(float(residuals[g]), tol, g)

        closed = operator_norm(stack[-1] - stack[0]) <= settings.tolerance_for(
            operator_norm(stack[0])
        )
        if is_loop and not closed:
            raise NotALoop(f"Endpoints differ by {operator_norm(stack[-1] - stack[0]):.3e}")
        loop = closed if is_loop is None else bool(is_loop)

        stack.setflags(write=False)
        residuals.setflags(write=False)
        return cls(stack, loop, float(tail_bound), residuals)

    def with_matrices(
        self, matrices: np.ndarray, tail_bound: float | None = None
    ) -> "OperatorPath":
        """Same grid and loop flag, new samples (no re-validation)."""
        stack = np.array(matrices, dtype=complex)
        residuals = np.array([normality_residual(m) for m in stack])
        stack.setflags(write=False)
        residuals.setflags(write=False)
        tail = self.tail_bound if tail_bound is None else tail_bound
        return OperatorPath(stack, self.is_loop, float(tail), residuals)


def _truncation_error(matrices: np.ndarray, m: int) -> float:
    if m >= matrices.shape[1]:
        return 0.0
    compressed = np.zeros_like(matrices)
    compressed[:, :m, :m] = matrices[:, :m, :m]
    return float(np.max(operator_norms(matrices - compressed)))


def truncate_path(path: OperatorPath, m: int) -> OperatorPath:
    """Replace every sample by its compression P_m M P_m embedded at full size.

    The new tail bound is the old one plus max_g ‖P_m M_g P_m − M_g‖.

    Raises:
        ValueError: If m is not in 1..dim
    """
    if not 1 <= m <= path.dim:
        raise ValueError(f"Truncation rank must be in 1..{path.dim}, got {m}")
    increment = _truncation_error(path.matrices, m)
    compressed = np.zeros_like(path.matrices)
    compressed[:, :m, :m] = path.matrices[:, :m, :m]
    logger.debug("truncate_path m=%d increment=%.3e", m, increment)
    return path.with_matrices(compressed, path.tail_bound + increment)


class TailIndex(NamedTuple):
    """Result of tail_index: the rank and whether it meets the tolerance."""

    m: int
    sufficient: bool


def tail_index(path: OperatorPath, eps: float) -> TailIndex:
    """Smallest m with max_g ‖P_m M_g P_m − M_g‖ + tail_bound < eps.

    Returns dim with sufficient=False when no rank within the window works.

    Raises:
        ValueError: If eps is not positive
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    for m in range(1, path.dim + 1):
        if _truncation_error(path.matrices, m) + path.tail_bound < eps:
            return TailIndex(m, True)
    logger.warning(
        "tail_index: eps=%.3e below the declared tail %.3e; window is insufficient",
        eps,
        path.tail_bound,
    )
    return TailIndex(path.dim, False)


def unroll_loop(loop: OperatorPath) -> OperatorPath:
    """Same samples viewed as a path over [0, 1].

    Raises:
        NotALoop: If the input is not a loop
    """
    if not loop.is_loop:
        raise NotALoop("unroll_loop needs a loop")
    return OperatorPath(loop.matrices, False, loop.tail_bound, loop.residuals)


def conjugate_path(path: OperatorPath, unitary: np.ndarray) -> OperatorPath:
    """The path x ↦ V M(x) V* for a fixed unitary V (same tail bound and loop flag)."""
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.shape != (path.dim, path.dim):
        raise SizeMismatch(path.dim, unitary.shape[0])
    conjugated = unitary @ path.matrices @ unitary.conj().T
    return path.with_matrices(conjugated)
