"""
Finite-rank approximation of a normal loop.

Modules:
    plan: Index sets S_n, α(n), σ′ and the modified eigenvalues λ′
    isometry: The partial-isometry family V₁
    assemble: Āₙ and B̄ₙ with their certificates
"""

from spectralloop.approximation.assemble import align_tracks, assemble_an, assemble_bn
from spectralloop.approximation.isometry import PartialIsometryPath, build_isometry_path
from spectralloop.approximation.plan import ApproximationPlan, build_lambda_prime, select_plan

__all__ = [
    "ApproximationPlan",
    "PartialIsometryPath",
    "align_tracks",
    "assemble_an",
    "assemble_bn",
    "build_isometry_path",
    "build_lambda_prime",
    "select_plan",
]
