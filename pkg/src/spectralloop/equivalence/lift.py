"""Lifting Φ to intertwining partial isometries.

Along the grid each eigenline carries a pair of unit vectors (one in the
p-family, one in its σ-partner), moved by parallel transport through the
bottleneck matches. W(x_g) = Σ_k b_k(g) a_k(g)* then intertwines every
triple. Over a loop the carried vectors come back with a diagonal gauge
defect, which is spread linearly over the loop.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.continuation.braid import check_condition1, trace_braid
from spectralloop.equivalence.phi import TriplePath, build_phi
from spectralloop.errors import (
    BoundViolated,
    ClosureDefectNotDiagonal,
    Condition1Missing,
    NotALoop,
    NotIntertwining,
)
from spectralloop.geometry.bottleneck import bottleneck_distance
from spectralloop.geometry.gauge import extract_phases, intertwining_residual, transport_vector
from spectralloop.geometry.triples import GaugePhases
from spectralloop.linalg import complete_basis, operator_norm, operator_norms
from spectralloop.operators.model import OperatorPath, unroll_loop

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiftedLoop:
    """Intertwining partial isometries W(x_g).

    Attributes:
        samples: Array (G + 1, dim, dim)
        residuals: Intertwining residual per grid point
        closure_phases: Gauge defect read at x = 1 before redistribution (loops only)
    """

    samples: np.ndarray = field(repr=False)
    residuals: np.ndarray
    closure_phases: GaugePhases | None = None

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0] - 1


def _transported(u: np.ndarray, target: np.ndarray) -> np.ndarray:
    moved = transport_vector(u, target, u)
    return moved / np.linalg.norm(moved)


def carry_frames(phi: TriplePath) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transport one (p, σ(p)) vector pair per eigenline along the grid.

    Returns:
        (a, b, positions): a and b of shape (G + 1, dim, s); positions[g, k]
        is the index in triple g of the eigenline that starts at index k
    """
    first = phi.triples[0]
    size, s = phi.grid_size, phi.size
    a = np.empty((size + 1, phi.dim, s), dtype=complex)
    b = np.empty_like(a)
    positions = np.empty((size + 1, s), dtype=int)
    a[0] = first.p_vectors
    b[0] = first.q_vectors[:, first.sigma]
    positions[0] = np.arange(s)
    for g in range(size):
        nxt = phi.triples[g + 1]
        positions[g + 1] = phi.matches[g].tau[positions[g]]
        for k, j in enumerate(positions[g + 1]):
            a[g + 1, :, k] = _transported(a[g, :, k], nxt.p_vectors[:, j])
            b[g + 1, :, k] = _transported(b[g, :, k], nxt.partner(j))
    return a, b, positions


def _check(samples: np.ndarray, phi: TriplePath, settings: Settings) -> np.ndarray:
    residuals = np.empty(phi.grid_size + 1)
    for g, triple in enumerate(phi.triples):
        w = samples[g]
        residuals[g] = max(
            intertwining_residual(w, triple),
            operator_norm(w.conj().T @ w - triple.p_support),
            operator_norm(w @ w.conj().T - triple.q_support),
        )
    worst = float(np.max(residuals))
    if worst > settings.lift_tol:
        raise NotIntertwining(worst)
    return residuals


def lift_path(phi: TriplePath, settings: Settings | None = None) -> LiftedLoop:
    """Intertwiners along a triple path, without closing them up.

    Raises:
        NotIntertwining: If a lifted sample misses the tolerance
    """
    settings = resolve(settings)
    a, b, _ = carry_frames(phi)
    samples = b @ a.conj().transpose(0, 2, 1)
    return LiftedLoop(samples, _check(samples, phi, settings))


def lift_loop(phi: TriplePath, settings: Settings | None = None) -> LiftedLoop:
    """A closed loop of intertwining partial isometries over a triple loop.

    W(x_0) sends each p-eigenvector to its σ-partner. After transport, the
    closure defect at x = 1 is the diagonal gauge z_i = e^{iθ_i} of the
    triple at x = 0; multiplying eigenline k by e^{−iθ g/G} removes it.

    Raises:
        NotALoop: If phi is not a loop
        ClosureDefectNotDiagonal: If the transported W(x_1) is not a gauge
            transform of W(x_0)
        NotIntertwining: If a lifted sample misses the tolerance
    """
    settings = resolve(settings)
    if not phi.is_loop:
        raise NotALoop("lift_loop needs a loop of triples")
    a, b, positions = carry_frames(phi)
    size = phi.grid_size
    ref, last = phi.triples[0], phi.triples[-1]
    end = b[size] @ a[size].conj().T

    phases = extract_phases(ref, last, end, settings)
    gauge = (ref.q_vectors[:, ref.sigma] * phases.values) @ ref.p_vectors.conj().T
    defect = operator_norm(end - gauge)
    if defect > settings.lift_tol:
        raise ClosureDefectNotDiagonal(defect)

    tau = bottleneck_distance(ref, last).tau
    arrival = np.argsort(tau)[positions[size]]
    theta = phases.angles[arrival]
    ramp = np.exp(-1j * np.outer(np.arange(size + 1) / size, theta))
    samples = (b * ramp[:, None, :]) @ a.conj().transpose(0, 2, 1)

    gap = operator_norm(samples[size] - samples[0])
    if gap > settings.lift_tol:
        raise ClosureDefectNotDiagonal(gap)
    samples[size] = samples[0]
    logger.info("lifted loop: closure phases %s", np.round(phases.angles, 6).tolist())
    return LiftedLoop(samples, _check(samples, phi, settings), phases)


@dataclass(frozen=True)
class StrongLift:
    """Unitaries U(x_g) with U Ā U* ≈ B̄ along a path.

    Attributes:
        samples: Array (G + 1, dim, dim)
        residuals: ‖U Ā U* − B̄‖ per grid point
        bound: The certified bound on every residual
    """

    samples: np.ndarray = field(repr=False)
    residuals: np.ndarray
    bound: float

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))


def strong_lift_path(
    a: OperatorPath,
    b: OperatorPath,
    threshold: float = 0.0,
    settings: Settings | None = None,
) -> StrongLift:
    """Unitary path conjugating Ā into B̄ up to the discarded tail.

    The lift acts on the retained eigenvectors; the complements are matched
    by deterministic orthonormal completions.

    Args:
        a: Path Ā; a loop is unrolled and lifted as a path over [0, 1]
        b: Path B̄ with the same retained spectrum at every grid point; unrolled
            like Ā
        threshold: Eigenvalues of modulus ≤ threshold are not retained
        settings: Numerical settings

    Returns:
        The unitaries and their residuals

    Raises:
        Condition1Missing: If a track of Ā is born or dies inside the grid
        SpectraMismatch: If the retained spectra differ
        BoundViolated: If a residual exceeds tol + 2·tail + 2·threshold
    """
    settings = resolve(settings)
    if a.is_loop or b.is_loop:
        logger.debug("Unrolling loops; the lift does not close up")
        a = unroll_loop(a) if a.is_loop else a
        b = unroll_loop(b) if b.is_loop else b
    braid = trace_braid(a, threshold, settings)
    report = check_condition1(braid, a)
    if not report.satisfied:
        raise Condition1Missing(
            f"{len(report.failures)} track events inside the grid, first at index "
            f"{report.failures[0].index}"
        )
    phi = build_phi(a, b, threshold, settings)
    w = lift_path(phi, settings).samples

    samples = np.empty_like(w)
    for g, triple in enumerate(phi.triples):
        rest_a = complete_basis(triple.p_vectors, a.dim)
        rest_b = complete_basis(triple.q_vectors, a.dim)
        samples[g] = w[g] + rest_b @ rest_a.conj().T

    conjugated = samples @ a.matrices @ samples.conj().transpose(0, 2, 1)
    residuals = operator_norms(conjugated - b.matrices)
    tail = max(a.tail_bound, b.tail_bound)
    bound = settings.lift_tol * max(1.0, a.norm) + 2 * tail + 2 * threshold
    worst = float(np.max(residuals))
    if worst > bound:
        raise BoundViolated(worst, bound, "‖U A U* − B‖")
    logger.info("strong lift: max residual %.3e (bound %.3e)", worst, bound)
    return StrongLift(samples, residuals, bound)
