"""Numerical settings shared by all spectralloop operations.

Settings are immutable. The process default is read once from the
environment; every operation also accepts an explicit ``settings=`` value.
"""

import os
from dataclasses import dataclass, replace
from functools import lru_cache

TOLERANCE_ENV = "SPECTRALLOOP_TOL"


@dataclass(frozen=True)
class Settings:
    """Tolerances and budgets of the numerical kernels.

    Attributes:
        normality_tol: Relative normality tolerance; a sample M is accepted
            when ‖MM* − M*M‖ ≤ normality_tol · max(‖M‖², 1).
        delta_min: Minimal gap between retained eigenvalues.
        quadrature_nodes: Initial node count of the contour quadrature.
        max_quadrature_nodes: Upper bound for adaptive node doubling.
        quadrature_tol: Change allowed between two node doublings.
        contour_margin: Minimal distance of the contour to the spectrum,
            relative to the contour radius.
        annulus_points: Points used to bound the resolvent on an annulus.
        transport_floor: Minimal ‖P_new w‖ accepted by section transport.
        lift_tol: Intertwining tolerance of lifted partial isometries.
        perturbation_fraction: Radial perturbation budget of modified
            eigenvalue tracks, as a fraction of 1/n.
        zero_tol: Modulus below which an eigenvalue of a finite-rank
            approximant counts as zero.
    """

    normality_tol: float = 1e-10
    delta_min: float = 1e-8
    quadrature_nodes: int = 128
    max_quadrature_nodes: int = 4096
    quadrature_tol: float = 1e-12
    contour_margin: float = 1e-6
    annulus_points: int = 64
    transport_floor: float = 0.5
    lift_tol: float = 1e-8
    perturbation_fraction: float = 0.1
    zero_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.normality_tol <= 0:
            raise ValueError(f"normality_tol must be positive, got {self.normality_tol}")
        if self.quadrature_nodes < 16:
            raise ValueError(f"quadrature_nodes must be at least 16, got {self.quadrature_nodes}")

    def tolerance_for(self, norm: float) -> float:
        """Absolute normality tolerance for a matrix of the given norm."""
        return self.normality_tol * max(norm * norm, 1.0)

    def with_tolerance(self, normality_tol: float) -> "Settings":
        """Return a copy with a different normality tolerance."""
        return replace(self, normality_tol=normality_tol)

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "Settings":
        """Build settings, letting SPECTRALLOOP_TOL override the tolerance.

        Args:
            environ: Mapping to read instead of os.environ

        Returns:
            Settings with the environment override applied

        Raises:
            ValueError: If the variable is set but is not a positive number
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(TOLERANCE_ENV)
        if raw is None or not raw.strip():
            return cls()
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"{TOLERANCE_ENV} must be a number, got {raw!r}") from None
        return cls(normality_tol=value)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide default settings."""
    return Settings.from_env()


def resolve(settings: Settings | None) -> Settings:
    """Return settings, falling back to the process default."""
    return get_settings() if settings is None else settings
