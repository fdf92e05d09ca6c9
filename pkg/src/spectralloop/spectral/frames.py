"""Eigenframes of normal samples and their separation data.

A frame keeps the eigenpairs of one grid sample whose eigenvalues lie
strictly outside the threshold disc. Everything inside the disc is charged
to the tail and never tracked.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg as la

from spectralloop.config import Settings, resolve
from spectralloop.errors import ContourHitsSpectrum, MultiplicityViolation
from spectralloop.operators.model import OperatorPath, OperatorSample
from spectralloop.spectral.riesz import riesz_projection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralFrame:
    """Thresholded eigenpairs of one sample.

    Attributes:
        point_index: Grid index of the sample
        matrix: The sample matrix
        eigenvalues: Retained eigenvalues, by descending modulus
        vectors: Unit eigenvectors as columns, in the same order
        threshold: Eigenvalues of modulus ≤ threshold are not retained
        spectrum: All eigenvalues (retained ones first)
        basis: Orthonormal eigenbasis matching ``spectrum``
    """

    point_index: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray
    threshold: float
    spectrum: np.ndarray
    basis: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def projection(self, i: int) -> np.ndarray:
        v = self.vectors[:, i]
        return np.outer(v, v.conj())

    @property
    def projections(self) -> np.ndarray:
        """Rank-one eigenprojections, shape (size, dim, dim)."""
        v = self.vectors.T
        return v[:, :, None] * v.conj()[:, None, :]

    @property
    def pairs(self) -> list[tuple[complex, np.ndarray, np.ndarray]]:
        """(eigenvalue, projection, eigenvector) for every retained eigenvalue."""
        return [
            (complex(lam), self.projection(i), self.vectors[:, i])
            for i, lam in enumerate(self.eigenvalues)
        ]


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    # largest component real and positive
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(lead) / lead)


def eigen_frame(
    sample: OperatorSample | np.ndarray,
    threshold: float,
    point_index: int = 0,
    settings: Settings | None = None,
) -> SpectralFrame:
    """Eigenpairs of a normal sample with modulus above the threshold.

    The eigenbasis comes from the complex Schur form, which is diagonal for
    normal matrices and therefore yields orthonormal eigenvectors. Pairs are
    ordered by descending modulus, then descending real and imaginary part.

    Args:
        sample: A validated sample or a normal matrix
        threshold: Exclusion radius around 0
        point_index: Grid index recorded in the frame
        settings: Numerical settings

    Returns:
        The frame

    Raises:
        MultiplicityViolation: If two retained eigenvalues are within delta_min
            of each other; tail eigenvalues are not compared
    """
    settings = resolve(settings)
    matrix = sample.matrix if isinstance(sample, OperatorSample) else np.asarray(sample)
    matrix = np.asarray(matrix, dtype=complex)
    triangular, unitary = la.schur(matrix, output="complex")
    spectrum = np.diag(triangular).copy()

    order = np.lexsort((-spectrum.imag, -spectrum.real, -np.abs(spectrum)))
    spectrum = spectrum[order]
    basis = _fix_phase(unitary[:, order])
    keep = int(np.count_nonzero(np.abs(spectrum) > threshold))

    retained = spectrum[:keep]
    gaps = np.abs(retained[:, None] - retained[None, :])
    gaps[np.arange(keep), np.arange(keep)] = np.inf
    if keep and gaps.size:
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        if gaps[i, j] <= settings.delta_min:
            raise MultiplicityViolation(int(i), int(j), float(gaps[i, j]))

    return SpectralFrame(
        point_index=point_index,
        matrix=matrix,
        eigenvalues=spectrum[:keep],
        vectors=basis[:, :keep],
        threshold=float(threshold),
        spectrum=spectrum,
        basis=basis,
    )


@dataclass(frozen=True)
class GapData:
    """Separation radii of the retained eigenvalues of one frame.

    Attributes:
        delta: Separation radius δ_i of each eigenvalue
        resolvent: Lower bound r_i of σ_min(λ − M) on the annulus
            δ_i/4 ≤ |λ − λ_i| ≤ δ_i/2
        alpha: Norm budget of a grid step that keeps the contour resolvent defined
        eta: Continuity radius of the Riesz projection
    """

    delta: np.ndarray
    resolvent: np.ndarray
    alpha: np.ndarray
    eta: np.ndarray

    def balls_disjoint(self, eigenvalues: np.ndarray) -> bool:
        """Whether the balls B(λ_i, δ_i) are pairwise disjoint and miss B(0, δ_i)."""
        lam = np.asarray(eigenvalues)
        if np.any(np.abs(lam) <= self.delta):
            return False
        dist = np.abs(lam[:, None] - lam[None, :])
        reach = self.delta[:, None] + self.delta[None, :]
        off = ~np.eye(len(lam), dtype=bool)
        return bool(np.all(dist[off] > reach[off]))


def separation_deltas(eigenvalues: np.ndarray, threshold: float) -> np.ndarray:
    """δ_i = ⅓·min(distance to the other eigenvalues, |λ_i| − threshold, |λ_i|)."""
    lam = np.asarray(eigenvalues)
    modulus = np.abs(lam)
    nearest = np.full(len(lam), np.inf)
    if len(lam) > 1:
        dist = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(dist, np.inf)
        nearest = dist.min(axis=1)
    return np.minimum(nearest, np.minimum(modulus - threshold, modulus)) / 3.0


def annulus_points(center: complex, delta: float, count: int) -> np.ndarray:
    """Points on the two boundary circles of δ/4 ≤ |λ − center| ≤ δ/2."""
    half = count // 2
    angles = 2.0 * np.pi * np.arange(half) / half
    inner = center + 0.25 * delta * np.exp(1j * angles)
    outer = center + 0.5 * delta * np.exp(1j * (angles + np.pi / half))
    return np.concatenate([inner, outer])


def separation_radii(frame: SpectralFrame, settings: Settings | None = None) -> GapData:
    """Separation and resolvent radii of every retained eigenvalue.

    Args:
        frame: A multiplicity-free frame
        settings: Numerical settings

    Returns:
        The gap data; alpha and eta both equal the resolvent bound

    Raises:
        ContourHitsSpectrum: If a point on the annulus is numerically singular
    """
    settings = resolve(settings)
    delta = separation_deltas(frame.eigenvalues, frame.threshold)
    resolvent = np.empty(frame.size)
    eye = np.eye(frame.dim)
    for i, lam in enumerate(frame.eigenvalues):
        points = annulus_points(lam, delta[i], settings.annulus_points)
        shifted = points[:, None, None] * eye - frame.matrix
        smallest = np.linalg.svd(shifted, compute_uv=False)[:, -1]
        resolvent[i] = float(smallest.min())
        if resolvent[i] <= settings.contour_margin * delta[i]:
            raise ContourHitsSpectrum(resolvent[i], settings.contour_margin * delta[i])
    return GapData(delta=delta, resolvent=resolvent, alpha=resolvent.copy(), eta=resolvent.copy())


def local_multiplicity_check(
    path: OperatorPath,
    g: int,
    center: complex,
    beta: float,
    settings: Settings | None = None,
) -> bool:
    """Check that the disc |λ − center| < β/2 holds exactly one eigenvalue nearby.

    The Riesz projection of the circle of radius β/2 is evaluated at g, at
    both neighbours and at every further grid point whose distance to the
    sample at g stays below the resolvent bound on that circle. The check
    passes when every trace equals 1. A neighbour with an eigenvalue on the
    circle fails the check.

    Raises:
        ValueError: If g is off the grid or beta is not positive
        ContourHitsSpectrum: If an eigenvalue of the sample at g sits on the circle
    """
    settings = resolve(settings)
    if not 0 <= g <= path.grid_size:
        raise ValueError(f"Grid index {g} outside 0..{path.grid_size}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    radius = beta / 2.0
    base = path.matrices[g]
    angles = 2.0 * np.pi * np.arange(settings.annulus_points) / settings.annulus_points
    circle = center + radius * np.exp(1j * angles)
    shifted = circle[:, None, None] * np.eye(path.dim) - base
    budget = float(np.linalg.svd(shifted, compute_uv=False)[:, -1].min())

    indices = {g}
    for step in (-1, 1):
        k = g + step
        while 0 <= k <= path.grid_size:
            if abs(k - g) > 1 and np.linalg.norm(path.matrices[k] - base, 2) >= budget:
                break
            indices.add(k)
            k += step

    for k in sorted(indices):
        try:
            projection = riesz_projection(path.matrices[k], center, radius, settings=settings)
        except ContourHitsSpectrum:
            if k == g:
                raise
            logger.debug("local multiplicity at %d: eigenvalue on the circle", k)
            return False
        trace = complex(np.trace(projection.matrix))
        logger.debug("local multiplicity at %d: trace %.6f%+.6fi", k, trace.real, trace.imag)
        if abs(trace - 1.0) >= 0.5:
            return False
    return True
