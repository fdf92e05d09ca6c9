"""Eigenvector sections along a braid and the diagonalizing family U₁."""

import logging
from dataclasses import dataclass, field

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.continuation.braid import EigenBraid
from spectralloop.errors import Condition1Missing, SpanDeficient, TransportBreakdown
from spectralloop.geometry.gauge import transport_vector
from spectralloop.linalg import complete_basis, operator_norm, operator_norms
from spectralloop.operators.model import OperatorPath

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FramedBraid:
    """A braid together with a transported unit eigenvector per track.

    Attributes:
        braid: The eigenvalue braid
        sections: Array (tracks, G + 1, dim); zero where a track is not alive
        overlaps: Array (tracks, G) of ⟨w(x_{g+1}), w(x_g)⟩ (real, positive), NaN off-track
    """

    braid: EigenBraid
    sections: np.ndarray = field(repr=False)
    overlaps: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.sections.shape[2]

    def section(self, track_id: int) -> np.ndarray:
        return self.sections[track_id]


def frame_transport(
    path: OperatorPath, braid: EigenBraid, settings: Settings | None = None
) -> FramedBraid:
    """Transport eigenvectors along each track.

    w(x_birth) is the stored frame eigenvector; afterwards
    w(x_{g+1}) = normalize(P(x_{g+1}) w(x_g)), which keeps ⟨w(x_{g+1}), w(x_g)⟩
    real and positive.

    Raises:
        TransportBreakdown: If ‖P(x_{g+1}) w(x_g)‖ falls below transport_floor
    """
    settings = resolve(settings)
    size = braid.grid_size
    sections = np.zeros((len(braid.tracks), size + 1, path.dim), dtype=complex)
    overlaps = np.full((len(braid.tracks), size), np.nan)
    for track in braid.tracks:
        tid = track.track_id
        g0, g1 = track.birth, track.death
        w = braid.frames[g0].vectors[:, track.slots[g0]]
        sections[tid, g0] = w
        for g in range(g0, g1):
            current = braid.frames[g].vectors[:, track.slots[g]]
            target = braid.frames[g + 1].vectors[:, track.slots[g + 1]]
            moved = transport_vector(current, target, w)
            length = float(np.linalg.norm(moved))
            if length < settings.transport_floor:
                raise TransportBreakdown(tid, g, length)
            moved = moved / length
            overlaps[tid, g] = float(np.vdot(moved, w).real)
            w = moved
            sections[tid, g + 1] = w
    logger.debug("transported %d sections over G=%d", len(braid.tracks), size)
    return FramedBraid(braid, sections, overlaps)


def diagonalize_path(framed: FramedBraid, settings: Settings | None = None) -> np.ndarray:
    """Unitaries U₁(x_g) whose column i is the section of track i.

    Columns of tracks that are not alive, and columns beyond the number of
    tracks, come from a Gram–Schmidt completion against the canonical basis.

    Returns:
        Array (G + 1, dim, dim)

    Raises:
        SpanDeficient: If there are more tracks than dimensions, or the
            sections at a grid point are not orthonormal eigenvectors
    """
    settings = resolve(settings)
    braid = framed.braid
    dim = framed.dim
    count = len(braid.tracks)
    if count > dim:
        raise SpanDeficient(0, f"({count} tracks in dimension {dim})")
    out = np.empty((braid.grid_size + 1, dim, dim), dtype=complex)
    for g in range(braid.grid_size + 1):
        alive = braid.alive_at(g)
        columns = framed.sections[alive, g].T
        gram = columns.conj().T @ columns
        if operator_norm(gram - np.eye(len(alive))) > settings.lift_tol:
            raise SpanDeficient(g, "(sections are not orthonormal)")
        extra = complete_basis(columns, dim)
        unitary = np.empty((dim, dim), dtype=complex)
        unitary[:, alive] = columns
        free = [k for k in range(dim) if k not in set(alive)]
        unitary[:, free] = extra
        out[g] = unitary

        matrix = braid.frames[g].matrix
        values = np.array([braid.tracks[t].values[g] for t in alive])
        block = columns.conj().T @ matrix @ columns - np.diag(values)
        residual = operator_norm(block)
        if residual > settings.lift_tol * max(1.0, operator_norm(matrix)):
            raise SpanDeficient(g, f"(diagonalization residual {residual:.3e})")
    return out


@dataclass(frozen=True)
class Condition2Witness:
    """Finite-rank compressions P_k U₁ P_k Λ P_k U₁* P_k for k = 1..n.

    Attributes:
        sequence: One array (G + 1, dim, dim) per k
        deviations: max_g ‖compression_k − Ā‖ per k
        bounds: max_g ‖P_k Ā P_k − Ā‖ + max |λ_i| over dropped tracks, per k
        nesting_defect: Largest gap between the diagonal data recovered from
            consecutive ranks, see ``nesting_defect``
        nested: Whether that gap is within the lift tolerance
    """

    sequence: tuple[np.ndarray, ...] = field(repr=False)
    deviations: np.ndarray
    bounds: np.ndarray
    nesting_defect: float
    nested: bool


CORNER_FLOOR = 1e-3


def recover_diagonal(
    approx: np.ndarray, unitaries: np.ndarray, k: int, floor: float = CORNER_FLOOR
) -> tuple[np.ndarray, np.ndarray]:
    """Read the rank-k diagonal back out of a compression C Λ_k C*.

    C is the upper-left k×k corner of U₁. Grid points where its smallest
    singular value is below ``floor`` are masked out.

    Returns:
        The values, shape (G + 1, k), and the mask of usable grid points
    """
    corner = unitaries[:, :k, :k]
    usable = np.linalg.svd(corner, compute_uv=False)[:, -1] > floor
    inverse = np.linalg.pinv(corner)
    block = inverse @ approx[:, :k, :k] @ inverse.conj().transpose(0, 2, 1)
    return np.diagonal(block, axis1=1, axis2=2).copy(), usable


def nesting_defect(
    sequence: list[np.ndarray] | tuple[np.ndarray, ...],
    unitaries: np.ndarray,
    floor: float = CORNER_FLOOR,
) -> float:
    """max |λ_i^{(k)} − λ_i^{(k−1)}| over i < k and grid points usable at both ranks.

    Args:
        sequence: Rank-1, rank-2, ... compressions, each (G + 1, dim, dim)
        unitaries: The diagonalizing family the compressions were cut from
        floor: Conditioning floor of the corners

    Returns:
        The defect, 0.0 if no grid point is usable at two consecutive ranks
    """
    defect = 0.0
    previous, previous_ok = recover_diagonal(sequence[0], unitaries, 1, floor)
    for k in range(2, len(sequence) + 1):
        values, ok = recover_diagonal(sequence[k - 1], unitaries, k, floor)
        both = ok & previous_ok
        if np.any(both):
            gap = np.abs(values[both, : k - 1] - previous[both])
            defect = max(defect, float(np.max(gap)))
        previous, previous_ok = values, ok
    return defect


def build_condition2_sequence(
    path: OperatorPath,
    framed: FramedBraid,
    n: int,
    settings: Settings | None = None,
) -> Condition2Witness:
    """Compressions of the diagonalization that approximate the path.

    Args:
        path: The traced path
        framed: Its framed braid
        n: Largest rank, 1 ≤ n ≤ dim
        settings: Numerical settings

    Returns:
        The witness

    Raises:
        ValueError: If n is out of range
        Condition1Missing: If some track does not span the whole grid
    """
    settings = resolve(settings)
    braid = framed.braid
    if not 1 <= n <= path.dim:
        raise ValueError(f"n must be in 1..{path.dim}, got {n}")
    broken = [t.track_id for t in braid.tracks if not t.is_full]
    if broken:
        raise Condition1Missing(f"Tracks {broken} do not span [0, 1]")

    unitaries = diagonalize_path(framed, settings)
    size, dim = path.grid_size + 1, path.dim
    diagonal = np.zeros((size, dim), dtype=complex)
    diagonal[:, : len(braid.tracks)] = braid.values().T

    sequence = []
    deviations = np.empty(n)
    bounds = np.empty(n)
    for k in range(1, n + 1):
        corner = np.zeros_like(unitaries)
        corner[:, :k, :k] = unitaries[:, :k, :k]
        cut = diagonal.copy()
        cut[:, k:] = 0.0
        approx = (corner * cut[:, None, :]) @ corner.conj().transpose(0, 2, 1)
        sequence.append(approx)
        deviations[k - 1] = float(np.max(operator_norms(approx - path.matrices)))

        compressed = np.zeros_like(path.matrices)
        compressed[:, :k, :k] = path.matrices[:, :k, :k]
        dropped = np.abs(diagonal[:, k:])
        bounds[k - 1] = float(np.max(operator_norms(compressed - path.matrices))) + float(
            np.max(dropped, initial=0.0)
        )
    defect = nesting_defect(sequence, unitaries)
    scale = 1.0 + float(np.max(np.abs(diagonal), initial=0.0))
    nested = defect <= settings.lift_tol * scale
    logger.info(
        "condition (2) witness up to rank %d: deviation %.3e, nesting defect %.3e",
        n,
        deviations[-1],
        defect,
    )
    return Condition2Witness(tuple(sequence), deviations, bounds, defect, nested)
