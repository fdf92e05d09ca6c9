"""Projection transport and the gauge phases of intertwiners.

Inside a chart of radius 1/4 around a center triple, an intertwiner U of a
nearby triple (U p̃ U* = σ̃(p̃)) is determined by one unit scalar per
eigenline. extract_phases reads those scalars against reference vectors of
the center; apply_gauge multiplies them in.
"""

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.errors import NotIntertwining, PreconditionViolated, TooFar
from spectralloop.geometry.bottleneck import CHART_RADIUS, bottleneck_distance
from spectralloop.geometry.triples import GaugePhases, ProjectionTriple, rank1_distance
from spectralloop.linalg import operator_norm


def transport_projection(p: np.ndarray, p_new: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(I + p_new − p)v, which maps ran(p) isomorphically onto ran(p_new).

    Args:
        p: Rank-one projection
        p_new: Rank-one projection with ‖p − p_new‖ < 1
        v: Vector in ran(p)

    Returns:
        A nonzero vector of ran(p_new) (not normalized)

    Raises:
        TooFar: If ‖p − p_new‖ ≥ 1
    """
    distance = operator_norm(p - p_new)
    if distance >= 1.0 - 1e-12:
        raise TooFar(distance)
    return v + p_new @ v - p @ v


def transport_vector(u: np.ndarray, u_new: np.ndarray, v: np.ndarray) -> np.ndarray:
    """transport_projection for the projections onto unit vectors u and u_new."""
    distance = rank1_distance(u, u_new)
    if distance >= 1.0 - 1e-12:
        raise TooFar(distance)
    return v + u_new * np.vdot(u_new, v) - u * np.vdot(u, v)


def intertwining_residual(unitary: np.ndarray, triple: ProjectionTriple) -> float:
    """max_i ‖U p_i U* − σ(p_i)‖."""
    residual = 0.0
    for i in range(triple.size):
        image = unitary @ triple.p_vectors[:, i]
        target = triple.partner(i)
        residual = max(
            residual, operator_norm(np.outer(image, image.conj()) - np.outer(target, target.conj()))
        )
    return residual


def _check_intertwines(unitary: np.ndarray, triple: ProjectionTriple, tol: float) -> None:
    residual = intertwining_residual(unitary, triple)
    if residual > tol:
        raise NotIntertwining(residual)


def extract_phases(
    ref: ProjectionTriple,
    near: ProjectionTriple,
    unitary: np.ndarray,
    settings: Settings | None = None,
) -> GaugePhases:
    """Gauge coordinates of an intertwiner of ``near`` in the chart of ``ref``.

    z_i = ⟨U·x_i, y_i⟩ with x_i, y_i the normalized transports of the
    reference vectors v_i ∈ ran(p_i) and w_i ∈ ran(σ(p_i)) onto the matched
    projections of ``near``.

    Args:
        ref: Chart center; its stored vectors are the reference vectors
        near: Triple within distance 1/4 of ref
        unitary: Partial isometry intertwining near
        settings: Numerical settings

    Returns:
        One phase per index of ref

    Raises:
        PreconditionViolated: If d(ref, near) ≥ 1/4
        NotIntertwining: If U does not intertwine near, or a phase is not unimodular
    """
    settings = resolve(settings)
    match = bottleneck_distance(ref, near)
    if match.value >= CHART_RADIUS:
        raise PreconditionViolated(f"d(ref, near) = {match.value:.3e} is outside the chart")
    _check_intertwines(unitary, near, settings.lift_tol)

    values = np.empty(ref.size, dtype=complex)
    for i in range(ref.size):
        j = match.tau[i]
        x = transport_vector(ref.p_vectors[:, i], near.p_vectors[:, j], ref.p_vectors[:, i])
        y = transport_vector(ref.partner(i), near.partner(j), ref.partner(i))
        x = x / np.linalg.norm(x)
        y = y / np.linalg.norm(y)
        values[i] = np.vdot(y, unitary @ x)
    defect = float(np.max(np.abs(np.abs(values) - 1.0), initial=0.0))
    if defect > settings.lift_tol:
        raise NotIntertwining(defect)
    return GaugePhases(values)


def apply_gauge(
    unitary: np.ndarray,
    phases: GaugePhases,
    triple: ProjectionTriple,
    settings: Settings | None = None,
) -> np.ndarray:
    """Σ_i z_i σ(p_i) U p_i.

    Raises:
        ValueError: If the number of phases differs from the triple size
        NotIntertwining: If U does not intertwine the triple
    """
    settings = resolve(settings)
    if len(phases) != triple.size:
        raise ValueError(f"Expected {triple.size} phases, got {len(phases)}")
    _check_intertwines(unitary, triple, settings.lift_tol)
    out = np.zeros_like(unitary, dtype=complex)
    for i, z in enumerate(phases.values):
        v = triple.p_vectors[:, i]
        w = triple.partner(i)
        out += z * np.outer(w, w.conj()) @ unitary @ np.outer(v, v.conj())
    return out
