"""Eigenvalue braids along a path.

trace_braid follows every retained eigenvalue from one grid point to the
next. A step of a track is accepted only when

- the grid step keeps the resolvent on the circle |λ − λ_i| = δ_i/2
  defined (‖ΔA‖ < α_i, or max over the circle of ‖ΔA(λ − A)⁻¹‖ < 1), so
  exactly one eigenvalue of the next sample lies inside that circle;
- the next sample has exactly one eigenvalue in the ball B(λ_i, δ_i/4).

A step that fails these tests is retried with the isolation radius, one
third of the distance to the rest of the full spectrum, in place of δ_i.
Tracks end when their eigenvalue drops into the threshold disc. A track
that still cannot be matched ends as ``no-safe-match`` only when its
nearest neighbour is a tail eigenvalue, and a new eigenvalue is born only
next to a tail eigenvalue or a track that just ended. Any other failure
asks for a finer grid.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.errors import NoCertifiedClosure, NotALoop, RefineGrid
from spectralloop.linalg import operator_norm
from spectralloop.operators.model import OperatorPath
from spectralloop.spectral.frames import (
    GapData,
    SpectralFrame,
    eigen_frame,
    separation_radii,
)

logger = logging.getLogger(__name__)

THRESHOLD = "threshold"
NO_SAFE_MATCH = "no-safe-match"
BELOW_THRESHOLD = "modulus-below-threshold"


@dataclass(frozen=True)
class Track:
    """One continued eigenvalue trajectory.

    Attributes:
        track_id: Index of the track in its braid
        values: λ(x_g) where alive, NaN elsewhere
        slots: Position of the eigenvalue in the frame at each grid point, −1 if not alive
        cause: Why the track ended before x = 1 ("threshold" or "no-safe-match")
    """

    track_id: int
    values: np.ndarray
    slots: np.ndarray
    cause: str | None = None

    @property
    def alive(self) -> np.ndarray:
        return self.slots >= 0

    @property
    def birth(self) -> int:
        return int(np.flatnonzero(self.alive)[0])

    @property
    def death(self) -> int:
        """Last grid index at which the track is alive."""
        return int(np.flatnonzero(self.alive)[-1])

    @property
    def is_full(self) -> bool:
        return bool(np.all(self.alive))

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.values[self.alive])))


@dataclass(frozen=True)
class EigenBraid:
    """The continued eigenvalues of a path.

    Attributes:
        threshold: Frame threshold
        tracks: Tracks in id order; ids at x = 0 follow frame order
        certified: Per step, whether every track step met its budget
        step_ratio: Per step, max over tracks of |Δλ|/(δ/4)
        is_loop: Whether the path is a loop
        monodromy: σ with λ_i(0) = λ_σ(i)(1) on tracks alive at both ends
            (−1 elsewhere); None when closure is not certified or not a loop
        frames: Frame of every grid point
        gaps: Separation data of every frame
    """

    threshold: float
    tracks: tuple[Track, ...]
    certified: np.ndarray
    step_ratio: np.ndarray
    is_loop: bool
    monodromy: np.ndarray | None
    frames: tuple[SpectralFrame, ...] = field(repr=False)
    gaps: tuple[GapData, ...] = field(repr=False)

    @property
    def grid_size(self) -> int:
        return len(self.frames) - 1

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid_size + 1) / self.grid_size

    def values(self) -> np.ndarray:
        """Track values, shape (tracks, G + 1), NaN where not alive."""
        if not self.tracks:
            return np.zeros((0, self.grid_size + 1), dtype=complex)
        return np.stack([t.values for t in self.tracks])

    def point_certified(self) -> np.ndarray:
        """Per grid point, whether every step touching it was certified."""
        out = np.ones(self.grid_size + 1, dtype=bool)
        out[:-1] &= self.certified
        out[1:] &= self.certified
        return out

    def alive_at(self, g: int) -> list[int]:
        return [t.track_id for t in self.tracks if t.slots[g] >= 0]

    def delta(self, track_id: int, g: int) -> float:
        """Separation radius of a track at a grid point where it is alive."""
        return float(self.gaps[g].delta[self.tracks[track_id].slots[g]])


def _isolation(frame: SpectralFrame, slot: int) -> tuple[float, bool]:
    """Distance from a retained eigenvalue to the rest of the full spectrum.

    Returns:
        The distance (inf for a 1×1 sample) and whether the nearest other
        eigenvalue lies in the tail
    """
    lam = frame.spectrum[slot]
    distance = np.abs(frame.spectrum - lam)
    distance[slot] = np.inf
    nearest = int(np.argmin(distance))
    return float(distance[nearest]), nearest >= frame.size


def _isolated_step(
    frame: SpectralFrame,
    nxt: SpectralFrame,
    slot: int,
    step: np.ndarray,
    step_norm: float,
    points: int,
) -> tuple[int | None, bool]:
    """Retry a failed step with the isolation radius in place of δ.

    δ also counts the distance to the threshold circle, which shrinks to
    zero as a track approaches the tail. The retry uses one third of the
    distance to the other eigenvalues, tail included, with the same budget
    and δ/4 ball tests.

    Returns:
        The matched index in ``nxt.spectrum`` (None if the retry fails) and
        whether the eigenvalue's nearest neighbour is a tail eigenvalue
    """
    isolation, tail_nearest = _isolation(frame, slot)
    lam = frame.spectrum[slot]
    radius = isolation / 3
    distance = np.abs(nxt.spectrum - lam)
    inside = np.flatnonzero(distance < radius / 4)
    if len(inside) != 1:
        return None, tail_nearest
    if (
        np.isfinite(radius)
        and step_norm >= radius / 4
        and _contour_budget(frame, step, lam, radius, points) >= 1.0
    ):
        return None, tail_nearest
    return int(inside[0]), tail_nearest


def _from_tail(frame: SpectralFrame, value: complex, ended: set[int]) -> bool:
    """Whether the nearest eigenvalue of ``frame`` to a new one left the braid."""
    nearest = int(np.argmin(np.abs(frame.spectrum - value)))
    return nearest >= frame.size or nearest in ended


def _contour_budget(
    frame: SpectralFrame, step: np.ndarray, lam: complex, delta: float, points: int
) -> float:
    """max over the circle |λ − lam| = δ/2 of ‖ΔA (λ − A)⁻¹‖."""
    circle = lam + 0.5 * delta * np.exp(2j * np.pi * np.arange(points) / points)
    rotated = step @ frame.basis
    scales = 1.0 / (circle[:, None] - frame.spectrum[None, :])
    return float(np.max(np.linalg.norm(rotated[None] * scales[:, None, :], ord=2, axis=(1, 2))))


def _closure(
    tracks: list[Track], frames: tuple[SpectralFrame, ...], gaps: tuple[GapData, ...]
) -> np.ndarray:
    """Match values at x = 0 against values at x = 1 with the δ/4 ball."""
    last = len(frames) - 1
    start = [t for t in tracks if t.slots[0] >= 0]
    end = [t for t in tracks if t.slots[last] >= 0]
    if len(start) != len(end):
        raise NoCertifiedClosure(
            detail=f"{len(start)} tracks at x = 0 but {len(end)} at x = 1"
        )
    sigma = np.full(len(tracks), -1, dtype=int)
    taken: set[int] = set()
    for t in start:
        target = t.values[0]
        hits = [
            s.track_id
            for s in end
            if abs(s.values[last] - target) < gaps[last].delta[s.slots[last]] / 4
        ]
        if len(hits) != 1 or hits[0] in taken:
            raise NoCertifiedClosure(t.track_id, f"({len(hits)} candidates at x = 1)")
        sigma[t.track_id] = hits[0]
        taken.add(hits[0])
    return sigma


def trace_braid(
    path: OperatorPath, threshold: float, settings: Settings | None = None
) -> EigenBraid:
    """Continue the retained eigenvalues across the grid.

    Args:
        path: A validated path or loop
        threshold: Frame threshold; eigenvalues inside this disc are tail
        settings: Numerical settings

    Returns:
        The braid, with monodromy for loops whose closure is certified

    Raises:
        ValueError: If threshold is negative
        RefineGrid: If a step cannot be certified away from the threshold
        MultiplicityViolation: If a frame is not multiplicity-free
    """
    settings = resolve(settings)
    if threshold < 0:
        raise ValueError(f"threshold must be nonnegative, got {threshold}")
    size = path.grid_size
    frames = tuple(
        eigen_frame(m, threshold, point_index=g, settings=settings)
        for g, m in enumerate(path.matrices)
    )
    gaps = tuple(separation_radii(f, settings) for f in frames)

    slots: list[np.ndarray] = []
    values: list[np.ndarray] = []
    causes: list[str | None] = []

    def open_track(g: int, slot: int) -> int:
        row = np.full(size + 1, -1, dtype=int)
        row[g] = slot
        vals = np.full(size + 1, np.nan, dtype=complex)
        vals[g] = frames[g].eigenvalues[slot]
        slots.append(row)
        values.append(vals)
        causes.append(None)
        return len(slots) - 1

    active = {open_track(0, s): s for s in range(frames[0].size)}
    certified = np.ones(size, dtype=bool)
    step_ratio = np.zeros(size)

    for g in range(size):
        frame, gap, nxt = frames[g], gaps[g], frames[g + 1]
        step = path.matrices[g + 1] - path.matrices[g]
        step_norm = operator_norm(step)
        claimed: dict[int, int] = {}
        ended: set[int] = set()
        for tid, s in sorted(active.items()):
            lam, delta = frame.eigenvalues[s], gap.delta[s]
            distance = np.abs(nxt.spectrum - lam)
            inside = np.flatnonzero(distance < delta / 4)
            budget_ok = step_norm < gap.alpha[s] or (
                _contour_budget(frame, step, lam, delta, settings.annulus_points) < 1.0
            )
            if budget_ok and len(inside) == 1:
                k = int(inside[0])
                step_ratio[g] = max(step_ratio[g], distance[k] / (delta / 4))
            else:
                k, tail_nearest = _isolated_step(
                    frame, nxt, s, step, step_norm, settings.annulus_points
                )
                if k is None:
                    reason = (
                        f"track {tid} at {complex(lam):.6g}: {len(inside)} eigenvalues "
                        f"within δ/4, budget {'ok' if budget_ok else 'exceeded'}"
                    )
                    if not tail_nearest:
                        raise RefineGrid(g, reason)
                    causes[tid] = NO_SAFE_MATCH
                    certified[g] = False
                    ended.add(s)
                    logger.warning("tail-limited track ended at step %d: %s", g, reason)
                    continue
                logger.debug("track %d continued by its isolation radius at step %d", tid, g)
            if k < nxt.size:
                claimed[tid] = k
            else:
                causes[tid] = THRESHOLD
                ended.add(s)
                logger.debug("track %d fell below the threshold at step %d", tid, g)

        matched = set(claimed.values())
        for k in range(nxt.size):
            if k in matched:
                continue
            value = complex(nxt.eigenvalues[k])
            if not _from_tail(frame, value, ended):
                raise RefineGrid(g, f"eigenvalue {value:.6g} appeared away from the tail")
            claimed[open_track(g + 1, k)] = k
            logger.debug("track born at step %d: %.6g", g + 1, complex(nxt.eigenvalues[k]))
        for tid, k in claimed.items():
            slots[tid][g + 1] = k
            values[tid][g + 1] = nxt.eigenvalues[k]
        active = claimed

    tracks = [
        Track(tid, vals, row, cause)
        for tid, (vals, row, cause) in enumerate(zip(values, slots, causes, strict=True))
    ]
    sigma = None
    if path.is_loop:
        try:
            sigma = _closure(tracks, frames, gaps)
        except NoCertifiedClosure as exc:
            logger.warning("loop closure not certified: %s", exc)
    logger.info(
        "traced %d tracks over G=%d (%d full)",
        len(tracks),
        size,
        sum(t.is_full for t in tracks),
    )
    return EigenBraid(
        threshold=float(threshold),
        tracks=tuple(tracks),
        certified=certified,
        step_ratio=step_ratio,
        is_loop=path.is_loop,
        monodromy=sigma,
        frames=frames,
        gaps=gaps,
    )


def monodromy(braid: EigenBraid) -> np.ndarray:
    """The closure permutation σ with λ_i(0) = λ_σ(i)(1).

    Raises:
        NotALoop: If the braid was traced over a path
        NoCertifiedClosure: If the endpoint values cannot be matched uniquely
    """
    if not braid.is_loop:
        raise NotALoop("monodromy needs a loop braid")
    if braid.monodromy is not None:
        return braid.monodromy
    return _closure(list(braid.tracks), braid.frames, braid.gaps)


def cycles(sigma: np.ndarray) -> list[list[int]]:
    """Cycle decomposition of a permutation (entries −1 are skipped)."""
    seen: set[int] = set()
    out = []
    for start in range(len(sigma)):
        if start in seen or sigma[start] < 0:
            continue
        cycle = []
        k = start
        while k not in seen and k >= 0:
            seen.add(k)
            cycle.append(k)
            k = int(sigma[k])
        out.append(cycle)
    return out


@dataclass(frozen=True)
class Condition1Failure:
    """A track that does not extend over the whole interval.

    Attributes:
        track: Track id
        index: Grid index where the track starts or ends
        event: "birth" or "death"
        reason: "modulus-below-threshold" or "no-safe-match"
        limit_zero: The modulus at the event is at most half the track maximum
        terminal_modulus: |λ| at the event
        max_modulus: Largest |λ| along the track
    """

    track: int
    index: int
    event: str
    reason: str
    limit_zero: bool
    terminal_modulus: float
    max_modulus: float

    def to_dict(self) -> dict:
        return {
            "track": self.track,
            "index": self.index,
            "event": self.event,
            "reason": self.reason,
            "limit_zero": self.limit_zero,
            "terminal_modulus": self.terminal_modulus,
            "max_modulus": self.max_modulus,
        }


@dataclass(frozen=True)
class Condition1Report:
    """Verdict on full eigenvalue continuation; satisfied iff no failures."""

    satisfied: bool
    failures: tuple[Condition1Failure, ...]

    def to_dict(self) -> dict:
        return {"satisfied": self.satisfied, "failures": [f.to_dict() for f in self.failures]}


def check_condition1(braid: EigenBraid, path: OperatorPath | None = None) -> Condition1Report:
    """Check that every track lives on the whole grid.

    Args:
        braid: A traced braid
        path: The traced path, used to check the grid

    Returns:
        The report

    Raises:
        ValueError: If path has a different grid than the braid
    """
    if path is not None and path.grid_size != braid.grid_size:
        raise ValueError(f"Braid has G={braid.grid_size}, path has G={path.grid_size}")
    last = braid.grid_size
    failures = []
    for track in braid.tracks:
        peak = track.max_modulus
        if track.birth > 0:
            modulus = abs(track.values[track.birth])
            failures.append(
                Condition1Failure(
                    track.track_id,
                    track.birth,
                    "birth",
                    BELOW_THRESHOLD,
                    bool(modulus <= 0.5 * peak),
                    float(modulus),
                    peak,
                )
            )
        if track.death < last:
            modulus = abs(track.values[track.death])
            reason = NO_SAFE_MATCH if track.cause == NO_SAFE_MATCH else BELOW_THRESHOLD
            failures.append(
                Condition1Failure(
                    track.track_id,
                    track.death,
                    "death",
                    reason,
                    bool(modulus <= 0.5 * peak),
                    float(modulus),
                    peak,
                )
            )
    report = Condition1Report(not failures, tuple(failures))
    logger.info("condition (1): %s (%d failures)", report.satisfied, len(failures))
    return report
