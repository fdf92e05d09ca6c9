"""Index sets and modified eigenvalue functions of the finite-rank approximant.

For a loop braid with monodromy σ and a level n:

- S_n holds the tracks whose modulus reaches 1/n somewhere;
- α(n) is the first grid point after which every track of S_n stays within
  1/n of its value at x = 1, or optionally the last one before x = 1;
- σ′ agrees with σ where σ stays inside S_n and sends the remaining tracks
  of S_n onto S_n \\ σ(S_n) in ascending order;
- λ′_i equals λ_i, except that tracks of S_n \\ σ(S_n) are bent on [α(n), 1]
  so that λ′_i(0) = λ′_σ′(i)(1).
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.continuation.braid import EigenBraid, monodromy
from spectralloop.errors import CannotSeparate, Condition1Missing, EmptySn

logger = logging.getLogger(__name__)

# λ′ tracks closer than this fraction of 1/n count as colliding
COLLISION_FRACTION = 0.01
PERTURBATION_STEPS = 16


@dataclass(frozen=True)
class ApproximationPlan:
    """Choices of the finite-rank approximation at level n.

    Attributes:
        n: Level
        tracks: Track ids of S_n, ascending
        tracks_at_start: Tracks of S_n with |λ(0)| ≥ 1/n
        tracks_at_end: Tracks of S_n with |λ(1)| ≥ 1/n
        alpha_index: Grid index of α(n)
        grid_size: G
        sigma: Monodromy on all tracks
        sigma_prime: σ′ on S_n as a dict
        moved: (i, σ′(i), σ(i)) for i ∈ S_n \\ σ⁻¹(S_n)
        lambda_prime: λ′ values, shape (s_n, G + 1), rows in the order of tracks
        perturbed: Track ids whose interpolant was pushed inward
    """

    n: int
    tracks: tuple[int, ...]
    tracks_at_start: tuple[int, ...]
    tracks_at_end: tuple[int, ...]
    alpha_index: int
    grid_size: int
    sigma: np.ndarray
    sigma_prime: dict[int, int]
    moved: tuple[tuple[int, int, int], ...]
    lambda_prime: np.ndarray | None = field(default=None, repr=False)
    perturbed: tuple[int, ...] = ()

    @property
    def s_n(self) -> int:
        return len(self.tracks)

    @property
    def alpha(self) -> float:
        return self.alpha_index / self.grid_size

    @property
    def extended(self) -> tuple[int, ...]:
        """S_n ∪ σ(S_n), the coordinates V₁ acts on."""
        return tuple(sorted(set(self.tracks) | {int(self.sigma[i]) for i in self.tracks}))

    def row(self, track_id: int) -> np.ndarray:
        """λ′ of one track of S_n."""
        if self.lambda_prime is None:
            raise ValueError("lambda_prime has not been built")
        return self.lambda_prime[self.tracks.index(track_id)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "S": list(self.tracks),
            "s_n": self.s_n,
            "S0": list(self.tracks_at_start),
            "S1": list(self.tracks_at_end),
            "alpha": self.alpha,
            "alpha_index": self.alpha_index,
            "sigma_prime": {str(k): v for k, v in sorted(self.sigma_prime.items())},
            "moved": [list(m) for m in self.moved],
            "perturbed": list(self.perturbed),
        }


def select_plan(braid: EigenBraid, n: int, latest: bool = False) -> ApproximationPlan:
    """Choose S_n, α(n) and σ′ for a loop braid.

    By default α(n) is the smallest grid point from which every track of S_n
    stays within 1/n of its closing value, so the bent part of λ′ is as long
    as the bound allows. With ``latest`` α(n) is the last grid point before
    x = 1 that satisfies the bound, and λ′ is bent over a single grid step.

    Args:
        braid: Loop braid whose tracks all span the grid
        n: Level, n ≥ 1
        latest: Take the largest admissible α(n) instead of the smallest

    Returns:
        The plan without λ′

    Raises:
        ValueError: If n < 1
        Condition1Missing: If a track does not span the grid
        NoCertifiedClosure: If the monodromy is not certified
        EmptySn: If no track reaches modulus 1/n
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    broken = [t.track_id for t in braid.tracks if not t.is_full]
    if broken:
        raise Condition1Missing(f"Tracks {broken} do not span the loop")
    sigma = monodromy(braid)
    level = 1.0 / n
    values = braid.values()
    size = braid.grid_size

    tracks = tuple(int(t.track_id) for t in braid.tracks if t.max_modulus >= level)
    if not tracks:
        raise EmptySn(n)
    rows = list(tracks)
    drift = np.abs(values[rows] - values[rows, size : size + 1])
    close = np.all(drift < level, axis=0)
    alpha_index = size
    if latest:
        if close[size - 1]:
            alpha_index = size - 1
    else:
        while alpha_index > 0 and close[alpha_index - 1]:
            alpha_index -= 1

    members = set(tracks)
    sigma_prime = {i: int(sigma[i]) for i in tracks if int(sigma[i]) in members}
    leaving = sorted(i for i in tracks if int(sigma[i]) not in members)
    image = {int(sigma[i]) for i in tracks}
    free = sorted(i for i in tracks if i not in image)
    moved = []
    for i, a in zip(leaving, free, strict=True):
        sigma_prime[i] = a
        moved.append((i, a, int(sigma[i])))

    plan = ApproximationPlan(
        n=n,
        tracks=tracks,
        tracks_at_start=tuple(i for i in tracks if abs(values[i, 0]) >= level),
        tracks_at_end=tuple(i for i in tracks if abs(values[i, size]) >= level),
        alpha_index=alpha_index,
        grid_size=size,
        sigma=np.asarray(sigma),
        sigma_prime=sigma_prime,
        moved=tuple(moved),
    )
    logger.info(
        "plan n=%d: s_n=%d alpha=%.4f moved=%s", n, plan.s_n, plan.alpha, list(plan.moved)
    )
    return plan


def log_polar(start: complex, end: complex, t: np.ndarray) -> np.ndarray:
    """Path from start to end with linear modulus and phase along the shorter arc.

    On a tie (opposite directions) the arc runs counter-clockwise.
    """
    turn = float(np.angle(end / start))
    modulus = (1.0 - t) * abs(start) + t * abs(end)
    return modulus * np.exp(1j * (np.angle(start) + t * turn))


def _collisions(row: np.ndarray, others: np.ndarray, gap: float) -> np.ndarray:
    if others.size == 0:
        return np.zeros(row.shape, dtype=bool)
    return np.any(np.abs(others - row[None, :]) <= gap, axis=0)


def build_lambda_prime(
    braid: EigenBraid, plan: ApproximationPlan, settings: Settings | None = None
) -> ApproximationPlan:
    """Fill in λ′ for every track of S_n.

    A track i ∈ S_n \\ σ(S_n) follows λ_i up to α(n) and then the log-polar
    path from λ_i(α(n)) to λ_σ′⁻¹(i)(0). An interpolant that comes within
    1/(100n) of another λ′ track is pushed radially inward with the profile
    sin(πt), by the smallest multiple of budget/16 that clears the collision,
    where budget = perturbation_fraction/n.

    Raises:
        CannotSeparate: If no inward push within the budget clears a collision
    """
    settings = resolve(settings)
    values = braid.values()
    size = plan.grid_size
    a = min(plan.alpha_index, size - 1)
    if a != plan.alpha_index:
        logger.warning("alpha(n) sits on x = 1; interpolating over the last grid step")
    rows = {i: values[i].copy() for i in plan.tracks}
    inverse = {target: source for source, target in plan.sigma_prime.items()}
    image = {int(plan.sigma[i]) for i in plan.tracks}
    bent = [i for i in plan.tracks if i not in image]

    t = (np.arange(a, size + 1) - a) / (size - a)
    for i in bent:
        rows[i][a:] = log_polar(values[i, a], values[inverse[i], 0], t)

    gap = COLLISION_FRACTION / plan.n
    budget = settings.perturbation_fraction / plan.n
    perturbed = []
    profile = np.sin(np.pi * t)
    for i in sorted(bent):
        others = np.array([rows[j][a:] for j in plan.tracks if j != i])
        hits = _collisions(rows[i][a:], others, gap)
        if not np.any(hits):
            continue
        base = rows[i][a:].copy()
        scale = budget / max(float(np.max(np.abs(base))), budget)
        for k in range(1, PERTURBATION_STEPS + 1):
            eps = min(scale * k / PERTURBATION_STEPS, 0.5)
            trial = base * (1.0 - eps * profile)
            if not np.any(_collisions(trial, others, gap)):
                rows[i][a:] = trial
                perturbed.append(i)
                logger.warning("track %d pushed inward by %.3e to avoid a collision", i, eps)
                break
        else:
            raise CannotSeparate(i, a + int(np.flatnonzero(hits)[0]))

    lambda_prime = np.stack([rows[i] for i in plan.tracks])
    return replace(plan, lambda_prime=lambda_prime, perturbed=tuple(perturbed))
