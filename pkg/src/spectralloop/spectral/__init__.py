"""Spectral kernels for normal samples.

This module provides:
- frames: Thresholded eigenframes, separation radii and local multiplicity checks
- riesz: Spectral projections by contour quadrature
- sqrt: Square roots of positive semidefinite matrices
"""

from spectralloop.spectral.frames import (
    GapData,
    SpectralFrame,
    eigen_frame,
    local_multiplicity_check,
    separation_radii,
)
from spectralloop.spectral.riesz import RieszProjection, riesz_projection
from spectralloop.spectral.sqrt import psd_sqrt

__all__ = [
    "GapData",
    "RieszProjection",
    "SpectralFrame",
    "eigen_frame",
    "local_multiplicity_check",
    "psd_sqrt",
    "riesz_projection",
    "separation_radii",
]
