"""Assembly of the finite-rank approximants Āₙ and B̄ₙ.

Āₙ(x) = U₁(x)V₁(x)Λ̄′(x)V₁(x)*U₁(x)*, where U₁ diagonalizes Ā along its
braid and Λ̄′ carries λ′ᵢ at the coordinates i ∈ S_n. Every result is
checked: loop closure, the 4/n + tail deviation bound, and the nonzero
spectrum against λ′.
"""

import logging

import numpy as np
from scipy.optimize import linear_sum_assignment

from spectralloop.approximation.isometry import PartialIsometryPath, build_isometry_path
from spectralloop.approximation.plan import ApproximationPlan
from spectralloop.config import Settings, resolve
from spectralloop.continuation.braid import EigenBraid, monodromy
from spectralloop.continuation.sections import FramedBraid, diagonalize_path
from spectralloop.errors import BoundViolated, SpectraMismatch
from spectralloop.linalg import operator_norm, operator_norms
from spectralloop.operators.model import OperatorPath

logger = logging.getLogger(__name__)

# eigenvalues of Āₙ below this modulus are the zero block
SPECTRUM_FLOOR = 1e-12


def _diagonal(plan: ApproximationPlan, dim: int) -> np.ndarray:
    if plan.lambda_prime is None:
        raise ValueError("lambda_prime has not been built; call build_lambda_prime first")
    diagonal = np.zeros((plan.grid_size + 1, dim), dtype=complex)
    diagonal[:, list(plan.tracks)] = plan.lambda_prime.T
    return diagonal


def spectrum_defect(matrix: np.ndarray, expected: np.ndarray) -> float:
    """Distance between the nonzero eigenvalues of a matrix and an expected multiset.

    Returns inf when the counts differ.
    """
    values = np.linalg.eigvals(matrix)
    values = values[np.abs(values) > SPECTRUM_FLOOR]
    if len(values) != len(expected):
        return float("inf")
    if len(values) == 0:
        return 0.0
    cost = np.abs(values[:, None] - expected[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def _assemble(
    path: OperatorPath,
    unitaries: np.ndarray,
    plan: ApproximationPlan,
    isometry: PartialIsometryPath,
    settings: Settings,
    name: str,
) -> OperatorPath:
    diagonal = _diagonal(plan, path.dim)
    core = (isometry.samples * diagonal[:, None, :]) @ isometry.samples.conj().transpose(0, 2, 1)
    matrices = unitaries @ core @ unitaries.conj().transpose(0, 2, 1)

    tol = settings.tolerance_for(path.norm)
    if path.is_loop:
        closure = operator_norm(matrices[-1] - matrices[0])
        if closure > tol:
            raise BoundViolated(closure, tol, f"{name} loop closure")

    deviation = float(np.max(operator_norms(matrices - path.matrices)))
    target = 4.0 / plan.n + path.tail_bound
    if deviation >= target:
        raise BoundViolated(deviation, target, f"‖{name} − original‖")

    spectral_tol = settings.lift_tol * max(1.0, path.norm)
    for g in range(plan.grid_size + 1):
        defect = spectrum_defect(matrices[g], plan.lambda_prime[:, g])
        if defect > spectral_tol:
            raise BoundViolated(defect, spectral_tol, f"spectrum of {name} at grid point {g}")

    logger.info("%s assembled: rank %d, deviation %.3e < %.3e", name, plan.s_n, deviation, target)
    approximant = OperatorPath.from_matrices(
        matrices, is_loop=path.is_loop, tail_bound=0.0, settings=settings, validate=False
    )
    return approximant


def assemble_an(
    path: OperatorPath,
    framed: FramedBraid,
    plan: ApproximationPlan,
    isometry: PartialIsometryPath | None = None,
    settings: Settings | None = None,
) -> OperatorPath:
    """Build Āₙ and check it against Ā.

    Args:
        path: The loop Ā
        framed: Sections along the braid of Ā
        plan: Plan with λ′ built
        isometry: V₁; built from the plan when omitted
        settings: Numerical settings

    Returns:
        Āₙ as a path with zero tail

    Raises:
        BoundViolated: If Āₙ does not close up, deviates from Ā by 4/n + tail
            or more, or has a nonzero spectrum other than λ′
    """
    settings = resolve(settings)
    isometry = isometry or build_isometry_path(plan, path.dim)
    unitaries = diagonalize_path(framed, settings)
    return _assemble(path, unitaries, plan, isometry, settings, "A_n")


def align_tracks(
    reference: EigenBraid, other: EigenBraid, settings: Settings | None = None
) -> np.ndarray:
    """Track ids of ``other`` matching each track of ``reference`` by value at x = 0.

    Args:
        reference: Braid whose ids are kept
        other: Braid of a path with the same spectra

    Returns:
        order with order[i] the id in ``other`` of reference track i

    Raises:
        SpectraMismatch: If the tracks cannot be paired within a quarter of
            their separation radius, or the loop monodromies disagree
    """
    resolve(settings)
    if len(reference.tracks) != len(other.tracks):
        raise SpectraMismatch(0, float("inf"))
    start = np.array([t.values[0] for t in other.tracks])
    order = np.empty(len(reference.tracks), dtype=int)
    for track in reference.tracks:
        distance = np.abs(start - track.values[0])
        j = int(np.argmin(distance))
        limit = reference.delta(track.track_id, 0) / 4
        if not distance[j] < limit:
            raise SpectraMismatch(0, float(distance[j]))
        order[track.track_id] = j
    if len(set(order.tolist())) != len(order):
        raise SpectraMismatch(0, 0.0)
    if reference.is_loop and other.is_loop:
        sigma_ref = monodromy(reference)
        sigma_other = monodromy(other)
        if not np.array_equal(sigma_other[order], order[sigma_ref]):
            raise SpectraMismatch(reference.grid_size, float("nan"))
    return order


def assemble_bn(
    path: OperatorPath,
    framed: FramedBraid,
    plan: ApproximationPlan,
    order: np.ndarray,
    isometry: PartialIsometryPath | None = None,
    settings: Settings | None = None,
) -> OperatorPath:
    """Build B̄ₙ with the plan of Ā and the sections of B̄.

    Args:
        path: The loop B̄
        framed: Sections along the braid of B̄
        plan: Plan of Ā with λ′ built
        order: Output of align_tracks(braid of Ā, braid of B̄)
        isometry: V₁ of the plan
        settings: Numerical settings

    Raises:
        BoundViolated: As for assemble_an
    """
    settings = resolve(settings)
    isometry = isometry or build_isometry_path(plan, path.dim)
    unitaries = diagonalize_path(framed, settings)
    columns = np.concatenate([order, np.arange(len(order), path.dim)])
    return _assemble(path, unitaries[:, :, columns], plan, isometry, settings, "B_n")
