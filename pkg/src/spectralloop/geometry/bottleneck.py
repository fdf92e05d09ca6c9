"""Bottleneck distance between projection triples.

d(a, b) = min over bijections τ of

    max_i max(‖p_i − p̃_τ(i)‖, ‖σp_i − σ̃p̃_τ(i)‖).

The minimum is found by binary search over the distinct edge costs with a
perfect-matching feasibility test on the thresholded bipartite graph.
"""

import logging
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from spectralloop.errors import PreconditionViolated, SizeMismatch
from spectralloop.geometry.triples import ProjectionTriple, rank1_distance

logger = logging.getLogger(__name__)

# below this value the minimizing bijection is unique
UNIQUE_BELOW = 0.5
CHART_RADIUS = 0.25


class BottleneckMatch(NamedTuple):
    """Optimal pairing between the p-families of two triples.

    Attributes:
        tau: tau[i] = j pairs p_i of the first triple with p̃_j of the second
        value: The bottleneck cost of tau, in [0, 2]
        certified_unique: value < 1/2, so tau is the only minimizer
    """

    tau: np.ndarray
    value: float
    certified_unique: bool


def cost_matrix(a: ProjectionTriple, b: ProjectionTriple) -> np.ndarray:
    """c(i, j) = max(‖p_i − p̃_j‖, ‖σp_i − σ̃p̃_j‖)."""
    n = a.size
    cost = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            cost[i, j] = max(
                rank1_distance(a.p_vectors[:, i], b.p_vectors[:, j]),
                rank1_distance(a.partner(i), b.partner(j)),
            )
    return cost


def _perfect(allowed: np.ndarray) -> bool:
    if allowed.shape[0] == 0:
        return True
    matching = maximum_bipartite_matching(csr_matrix(allowed), perm_type="column")
    return bool(np.all(matching >= 0))


def _lexicographic_tau(cost: np.ndarray, value: float) -> np.ndarray:
    """Smallest permutation (lexicographically) whose costs stay ≤ value."""
    n = cost.shape[0]
    allowed = cost <= value
    tau = np.empty(n, dtype=int)
    free = np.ones(n, dtype=bool)
    for i in range(n):
        for j in np.flatnonzero(allowed[i] & free):
            free[j] = False
            rest = allowed[i + 1 :][:, free]
            if _perfect(rest):
                tau[i] = j
                break
            free[j] = True
        else:
            raise AssertionError("threshold graph lost its perfect matching")
    return tau


def bottleneck_distance(a: ProjectionTriple, b: ProjectionTriple) -> BottleneckMatch:
    """Exact bottleneck distance and its lexicographically smallest minimizer.

    Args:
        a: First triple
        b: Second triple

    Returns:
        The optimal match

    Raises:
        SizeMismatch: If the triples differ in size or dimension
    """
    if a.size != b.size:
        raise SizeMismatch(a.size, b.size)
    if a.dim != b.dim:
        raise SizeMismatch(a.dim, b.dim)
    if a.size == 0:
        return BottleneckMatch(np.zeros(0, dtype=int), 0.0, True)

    cost = cost_matrix(a, b)
    candidates = np.unique(cost)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect(cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    value = float(candidates[lo])
    tau = _lexicographic_tau(cost, value)
    logger.debug("bottleneck distance %.3e over %d candidate costs", value, len(candidates))
    return BottleneckMatch(tau, value, value < UNIQUE_BELOW)


def match_stability(ref: ProjectionTriple, a: ProjectionTriple, b: ProjectionTriple) -> float:
    """Pairing gap of a and b seen through their optimal matches against ref.

    Returns

        max_i max(‖p̃_τ̃(i) − p̂_τ̂(i)‖, ‖σ̃p̃_τ̃(i) − σ̂p̂_τ̂(i)‖),

    which is bounded by d(a, b) inside the chart.

    Raises:
        PreconditionViolated: If d(ref, a) or d(ref, b) is at least 1/4
    """
    match_a = bottleneck_distance(ref, a)
    match_b = bottleneck_distance(ref, b)
    for name, match in (("a", match_a), ("b", match_b)):
        if match.value >= CHART_RADIUS:
            raise PreconditionViolated(
                f"d(ref, {name}) = {match.value:.3e} is outside the chart radius {CHART_RADIUS}"
            )
    gap = 0.0
    for i in range(ref.size):
        ja, jb = match_a.tau[i], match_b.tau[i]
        gap = max(
            gap,
            rank1_distance(a.p_vectors[:, ja], b.p_vectors[:, jb]),
            rank1_distance(a.partner(ja), b.partner(jb)),
        )
    return gap
