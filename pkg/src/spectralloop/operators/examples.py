"""Built-in generators.

``shift_loop`` is a finite window of a loop whose eigenvalue tracks shift
by one index around the circle. It satisfies condition (1), and its
monodromy is n ↦ n − 1.

``collapse_path`` is a path whose top eigenvalue descends through the
moduli 1/2ⁿ and reaches 0 at x = 0. It is the standard path without
condition (1).

``rotating_diagonal_path`` is a generic family used for strong-equivalence
tests.
"""

import math

import numpy as np
from scipy import linalg as la

from spectralloop.config import Settings
from spectralloop.expression import Expression, parse_expression
from spectralloop.operators.generator import DIAGONAL, ROTATION, GeneratorSpec, Segment
from spectralloop.operators.model import OperatorPath

# ln 2: −½·2^x·e^{iπx} runs from −1/2 to 1 through the lower half-plane
LN2 = repr(math.log(2.0))


def _shift_eigenvalue(n: int, window: int, repaired: bool) -> str:
    if n == window:
        # closes the window: 2^{-k} at x=0 to -2^{-k} at x=1
        return f"exp(i*pi*x)/{2**window}"
    if n >= 0:
        return f"1/{2**n} - x/{2 ** (n + 1)}"
    if n == -1:
        if repaired:
            return f"-0.5*exp({LN2}*x)*exp(i*pi*x)"
        return "(3/2*x - 1/2)*exp(2*pi*i*x)"
    return f"-(x + 1)/{2 ** (-n)}"


def shift_loop_spec(window: int = 4, repaired: bool = True) -> GeneratorSpec:
    """Window −k..k of the index-shift loop (dim 2k + 1, coordinate n + k).

    The eigenvalue functions are

        λ_n(x) = 1/2ⁿ − x/2ⁿ⁺¹           (0 ≤ n < k)
        λ_k(x) = e^{iπx}/2ᵏ              (window edge)
        λ_{−1}(x) = −½·2ˣ·e^{iπx}         ((3x/2 − ½)e^{2πix} when not repaired)
        λ_n(x) = −(x + 1)/2^{−n}         (n ≤ −2)

    and U(x) is the product of quarter-turn rotations in the planes
    (0, 1), (0, 2), ..., (0, 2k) run one after the other, so that
    U(1) e_c = ±e_{c+1 mod 2k+1}.

    Args:
        window: Half width k ≥ 1 of the window
        repaired: Use the nonvanishing λ_{−1}; the printed formula vanishes at x = 1/3

    Returns:
        The generator
    """
    if window < 1:
        raise ValueError(f"window must be at least 1, got {window}")
    dim = 2 * window + 1
    diagonal = tuple(
        parse_expression(_shift_eigenvalue(n, window, repaired))
        for n in range(-window, window + 1)
    )
    stages = 2 * window
    segments = tuple(
        Segment(
            kind=ROTATION,
            indices=(0, j),
            support=((j - 1) / stages, j / stages),
            rest="below",
            angle=parse_expression(f"pi/2*({stages}*x - {j - 1})"),
        )
        for j in range(1, dim)
    )
    label = "shift-loop" if repaired else "shift-loop-printed"
    return GeneratorSpec(dim, diagonal, segments, tail_bound=2.0 ** (1 - window), name=label)


def collapse_path_spec(depth: int = 6, repaired: bool = True) -> GeneratorSpec:
    """Path whose top eigenvalue collapses to 0 at x = 0 (dim depth + 2).

    Starting from diag(1, 1/2, 1/4, ...) at x = 1, stage n (0 ≤ n < depth)
    rotates coordinates (n, n + 1) by a quarter turn on [3/2ⁿ⁺², 1/2ⁿ] and
    then rescales them on [1/2ⁿ⁺¹, 3/2ⁿ⁺²], so that the tracked eigenvalue
    has modulus 1/2ⁿ on the rotation intervals and |2x − 1/2ⁿ⁺¹| on the
    scaling intervals. A final scaling on [0, 1/2^depth] takes it to 0.

    Args:
        depth: Number of rotate/rescale stages
        repaired: Use scales that are the identity at both support endpoints;
            the printed scales are not, and evaluation then raises
            DiscontinuousSegment

    Returns:
        The generator
    """
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    dim = depth + 2
    diagonal = tuple(Expression.from_value(2.0**-c) for c in range(dim))
    segments: list[Segment] = []
    for n in range(depth):
        segments.append(
            Segment(
                kind=ROTATION,
                indices=(n, n + 1),
                support=(3 / 2 ** (n + 2), 1 / 2**n),
                rest="above",
                angle=parse_expression(f"{2 ** (n + 1)}*pi*(1/{2**n} - x)"),
            )
        )
        theta = f"(3 - {2 ** (n + 2)}*x)"
        if repaired:
            lower = f"sqrt({2 ** (n + 1)}*x - 1/2)"
            scales = (
                parse_expression(f"exp(i*pi/12*sin(pi*{theta}))/{lower}"),
                parse_expression(lower),
            )
        else:
            scales = (
                parse_expression(f"(4 - {2 ** (n + 2)}*x)/sqrt(2)*exp(2*pi*i*{theta})"),
                parse_expression(f"sqrt(2)/(4 - {2 ** (n + 2)}*x)*exp(-2*pi*i*{theta})"),
            )
        segments.append(
            Segment(
                kind=DIAGONAL,
                indices=(n, n + 1),
                support=(1 / 2 ** (n + 1), 3 / 2 ** (n + 2)),
                rest="above",
                scales=scales,
            )
        )
    segments.append(
        Segment(
            kind=DIAGONAL,
            indices=(depth, depth + 1),
            support=(0.0, 1 / 2**depth),
            rest="above",
            scales=(
                parse_expression(f"sqrt({2**depth}*x)*exp(i*pi/2*(1 - {2**depth}*x))"),
                parse_expression("1"),
            ),
        )
    )
    label = "collapse-path" if repaired else "collapse-path-printed"
    return GeneratorSpec(dim, diagonal, tuple(segments), tail_bound=2.0**-depth, name=label)


def collapse_modulus(x: np.ndarray) -> np.ndarray:
    """Modulus of the collapsing eigenvalue away from the final stage.

    1/2ⁿ on [3/2ⁿ⁺², 1/2ⁿ] and |2x − 1/2ⁿ⁺¹| on [1/2ⁿ⁺¹, 3/2ⁿ⁺²].
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for idx, value in np.ndenumerate(x):
        if value <= 0:
            continue
        n = int(math.floor(-math.log2(value)))
        if value >= 3 / 2 ** (n + 2):
            out[idx] = 1 / 2**n
        else:
            out[idx] = abs(2 * value - 1 / 2 ** (n + 1))
    return out


def rotating_diagonal_path(
    eigenvalues: np.ndarray,
    generator: np.ndarray,
    grid: int,
    drift: np.ndarray | None = None,
    settings: Settings | None = None,
) -> OperatorPath:
    """The path x ↦ e^{−ixK} diag(λ + x·drift) e^{ixK} for Hermitian K.

    Args:
        eigenvalues: Diagonal entries at x = 0
        generator: Hermitian matrix K
        grid: Grid size G
        drift: Linear drift of the diagonal entries
        settings: Numerical settings

    Returns:
        A normal path (not a loop in general)
    """
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    drift = np.zeros_like(eigenvalues) if drift is None else np.asarray(drift, dtype=complex)
    x = np.arange(grid + 1) / grid
    samples = []
    for xg in x:
        rot = la.expm(-1j * xg * generator)
        samples.append(rot @ np.diag(eigenvalues + xg * drift) @ rot.conj().T)
    return OperatorPath.from_matrices(samples, is_loop=False, settings=settings)
