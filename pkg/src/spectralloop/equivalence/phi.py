"""The map Φ from the grid into the base of projection triples.

At every grid point the retained eigenvectors of A give the p-family, those
of B the q-family, and σ pairs eigenvectors with equal eigenvalues.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from spectralloop.config import Settings, resolve
from spectralloop.errors import ChartTooCoarse, SizeMismatch, SpectraMismatch
from spectralloop.geometry.bottleneck import CHART_RADIUS, BottleneckMatch, bottleneck_distance
from spectralloop.geometry.triples import ProjectionTriple
from spectralloop.operators.model import OperatorPath
from spectralloop.spectral.frames import SpectralFrame, eigen_frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriplePath:
    """Projection triples along the grid.

    Attributes:
        triples: One triple per grid point
        matches: Optimal match from triple g to triple g + 1
        distances: d(t_g, t_{g+1})
        closing: Match from the last triple back to the first (loops only)
    """

    triples: tuple[ProjectionTriple, ...] = field(repr=False)
    matches: tuple[BottleneckMatch, ...] = field(repr=False)
    distances: np.ndarray
    closing: BottleneckMatch | None = None

    @property
    def grid_size(self) -> int:
        return len(self.triples) - 1

    @property
    def is_loop(self) -> bool:
        return self.closing is not None

    @property
    def size(self) -> int:
        return self.triples[0].size

    @property
    def dim(self) -> int:
        return self.triples[0].dim


def pair_by_eigenvalue(
    frame_a: SpectralFrame, frame_b: SpectralFrame, tol: float, index: int = 0
) -> np.ndarray:
    """σ with eigenvalue_b[σ(i)] = eigenvalue_a[i] within tol.

    Raises:
        SpectraMismatch: If the retained counts differ or a pair is farther
            apart than tol
    """
    if frame_a.size != frame_b.size:
        raise SpectraMismatch(index, float("inf"))
    if frame_a.size == 0:
        return np.zeros(0, dtype=int)
    cost = np.abs(frame_a.eigenvalues[:, None] - frame_b.eigenvalues[None, :])
    rows, cols = linear_sum_assignment(cost)
    gap = float(np.max(cost[rows, cols]))
    if gap > tol:
        raise SpectraMismatch(index, gap)
    sigma = np.empty(frame_a.size, dtype=int)
    sigma[rows] = cols
    return sigma


def build_phi(
    a: OperatorPath,
    b: OperatorPath,
    threshold: float,
    settings: Settings | None = None,
) -> TriplePath:
    """Triples (eigenprojections of A, eigenprojections of B, σ) along the grid.

    Args:
        a: First path or loop
        b: Second path or loop on the same grid
        threshold: Eigenvalues of modulus ≤ threshold are not retained
        settings: Numerical settings

    Returns:
        The triple path with its consecutive bottleneck matches

    Raises:
        SizeMismatch: If the grids or windows differ
        SpectraMismatch: If the retained spectra differ at a grid point
        ChartTooCoarse: If consecutive triples are 1/4 or more apart
    """
    settings = resolve(settings)
    if a.grid_size != b.grid_size:
        raise SizeMismatch(a.grid_size, b.grid_size)
    if a.dim != b.dim:
        raise SizeMismatch(a.dim, b.dim)
    tol = settings.lift_tol * max(1.0, a.norm)

    triples = []
    for g in range(a.grid_size + 1):
        frame_a = eigen_frame(a.matrices[g], threshold, g, settings)
        frame_b = eigen_frame(b.matrices[g], threshold, g, settings)
        sigma = pair_by_eigenvalue(frame_a, frame_b, tol, g)
        if triples and frame_a.size != triples[0].size:
            raise SpectraMismatch(g, float("inf"))
        triple = ProjectionTriple(frame_a.vectors, frame_b.vectors, sigma, frame_a.eigenvalues)
        triples.append(triple)

    matches = []
    distances = np.empty(a.grid_size)
    for g in range(a.grid_size):
        match = bottleneck_distance(triples[g], triples[g + 1])
        if match.value >= CHART_RADIUS:
            raise ChartTooCoarse(g, match.value)
        matches.append(match)
        distances[g] = match.value

    closing = None
    if a.is_loop and b.is_loop:
        closing = bottleneck_distance(triples[-1], triples[0])
        if closing.value >= CHART_RADIUS:
            raise ChartTooCoarse(a.grid_size, closing.value)
    logger.info(
        "phi: %d triples of size %d, max consecutive distance %.3e",
        len(triples),
        triples[0].size,
        float(np.max(distances)),
    )
    return TriplePath(tuple(triples), tuple(matches), distances, closing)
