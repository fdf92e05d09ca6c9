"""The partial-isometry family V₁ in track coordinates."""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as la

from spectralloop.approximation.plan import ApproximationPlan
from spectralloop.errors import SizeMismatch


@dataclass(frozen=True)
class PartialIsometryPath:
    """V₁(x_g) for every grid point.

    Attributes:
        samples: Array (G + 1, dim, dim)
        rank: s_n, the rank of every sample
        generator: The real skew-symmetric K of the rotation ramp
    """

    samples: np.ndarray = field(repr=False)
    rank: int
    generator: np.ndarray = field(repr=False)

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0] - 1

    def initial_projection(self) -> np.ndarray:
        """V₁*V₁, which is P_H at every grid point."""
        return self.samples[0].conj().T @ self.samples[0]


def rotation_generator(plan: ApproximationPlan, dim: int) -> np.ndarray:
    """K = (π/2)·Σ (e_b e_aᵀ − e_a e_bᵀ) over the moved pairs a = σ′(i), b = σ(i)."""
    generator = np.zeros((dim, dim))
    for _, a, b in plan.moved:
        generator[b, a] += np.pi / 2
        generator[a, b] -= np.pi / 2
    return generator


def build_isometry_path(plan: ApproximationPlan, dim: int) -> PartialIsometryPath:
    """V₁ = P_H on [0, α(n)] and exp(θ(x)K)·P_H on [α(n), 1].

    θ ramps linearly from 0 at α(n) to 1 at x = 1, so V₁(1)e_σ′(i) = e_σ(i)
    on the moved indices and V₁ fixes e_i for i ∈ S_n ∩ σ(S_n).

    Args:
        plan: Plan from select_plan
        dim: Window dimension

    Returns:
        The family V₁

    Raises:
        SizeMismatch: If a moved index falls outside the window
    """
    needed = max(plan.extended, default=-1) + 1
    if needed > dim:
        raise SizeMismatch(needed, dim)
    size = plan.grid_size
    a = min(plan.alpha_index, size - 1)
    head = np.zeros((dim, dim))
    head[list(plan.tracks), list(plan.tracks)] = 1.0
    generator = rotation_generator(plan, dim)

    theta = np.clip((np.arange(size + 1) - a) / (size - a), 0.0, 1.0)
    samples = np.empty((size + 1, dim, dim), dtype=complex)
    for g, t in enumerate(theta):
        samples[g] = head if t == 0.0 else la.expm(t * generator) @ head
    return PartialIsometryPath(samples, plan.s_n, generator)
