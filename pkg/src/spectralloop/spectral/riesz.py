"""Riesz spectral projections by contour quadrature.

The projection onto the eigenvalues enclosed by the circle
|λ − c| = r is (1/2πi)∮(λ − M)⁻¹ dλ. With λ_k = c + r·e^{2πik/N} the
trapezoidal rule reads

    P ≈ (1/N) Σ_k r·e^{2πik/N} (λ_k − M)⁻¹

and converges geometrically for this analytic integrand.
"""

import logging
from dataclasses import dataclass

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.errors import ContourHitsSpectrum, QuadratureNotConverged
from spectralloop.linalg import operator_norm
from spectralloop.operators.model import OperatorSample

logger = logging.getLogger(__name__)

MIN_NODES = 16


@dataclass(frozen=True)
class RieszProjection:
    """A quadrature approximation of a spectral projection.

    Attributes:
        matrix: The approximate projection Q
        nodes: Quadrature nodes used for Q
        error_bound: max of the last doubling change, ‖Q² − Q‖ and ‖Q − Q*‖
    """

    matrix: np.ndarray
    nodes: int
    error_bound: float

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def _trapezoid(matrix: np.ndarray, center: complex, radius: float, nodes: int) -> np.ndarray:
    offsets = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    eye = np.eye(matrix.shape[0], dtype=complex)
    shifted = (center + offsets)[:, None, None] * eye - matrix
    resolvents = np.linalg.solve(shifted, np.broadcast_to(eye, shifted.shape))
    # fixed summation order over the nodes
    return np.sum(offsets[:, None, None] * resolvents, axis=0) / nodes


def contour_distance(matrix: np.ndarray, center: complex, radius: float) -> float:
    """Distance of the spectrum of ``matrix`` to the circle |λ − center| = radius."""
    eigenvalues = np.linalg.eigvals(matrix)
    return float(np.min(np.abs(np.abs(eigenvalues - center) - radius)))


def riesz_projection(
    sample: OperatorSample | np.ndarray,
    center: complex,
    radius: float,
    nodes: int | None = None,
    adaptive: bool = True,
    settings: Settings | None = None,
) -> RieszProjection:
    """Spectral projection for the eigenvalues inside a circle.

    Args:
        sample: A sample or a square matrix
        center: Circle center
        radius: Circle radius
        nodes: Initial node count (defaults to settings.quadrature_nodes)
        adaptive: Double the nodes until the result changes by at most
            settings.quadrature_tol
        settings: Numerical settings

    Returns:
        The projection with its quadrature error bound

    Raises:
        ValueError: If nodes < 16 or radius is not positive
        ContourHitsSpectrum: If the spectrum is within contour_margin·radius
            of the circle
        QuadratureNotConverged: If max_quadrature_nodes is reached first
    """
    settings = resolve(settings)
    matrix = sample.matrix if isinstance(sample, OperatorSample) else np.asarray(sample)
    matrix = np.asarray(matrix, dtype=complex)
    nodes = settings.quadrature_nodes if nodes is None else int(nodes)
    if nodes < MIN_NODES:
        raise ValueError(f"At least {MIN_NODES} quadrature nodes are required, got {nodes}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    distance = contour_distance(matrix, center, radius)
    margin = settings.contour_margin * radius
    if distance < margin:
        raise ContourHitsSpectrum(distance, margin)

    current = _trapezoid(matrix, center, radius, nodes)
    change = 0.0
    if adaptive:
        while True:
            if 2 * nodes > settings.max_quadrature_nodes:
                raise QuadratureNotConverged(nodes, change)
            refined = _trapezoid(matrix, center, radius, 2 * nodes)
            change = operator_norm(refined - current)
            nodes *= 2
            current = refined
            logger.debug("riesz quadrature: %d nodes, change %.3e", nodes, change)
            if change <= settings.quadrature_tol:
                break

    idempotency = operator_norm(current @ current - current)
    symmetry = operator_norm(current - current.conj().T)
    return RieszProjection(current, nodes, max(change, idempotency, symmetry))
