"""Parametric generators of operator paths.

A generator starts from a diagonal matrix of expressions in x and applies
an ordered list of two-by-two block segments. The first segment listed is
the innermost one:

    D_0(x) = diag(initial(x)),   D_{s+1}(x) = T_s(x) D_s(x) T_s(x)^†

where T^† is T* for rotation blocks and Tᵀ for diagonal-scale blocks.
Each segment is the identity on its resting side of the support interval
and holds its endpoint value on the other side.
"""

import logging
from dataclasses import dataclass

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.errors import DiscontinuousSegment, ExpressionError
from spectralloop.expression import Expression
from spectralloop.operators.model import OperatorPath

logger = logging.getLogger(__name__)

ROTATION = "rotation"
DIAGONAL = "diagonal"
REST_SIDES = ("above", "below")


@dataclass(frozen=True)
class Segment:
    """One block factor of a generator.

    Attributes:
        kind: "rotation" or "diagonal"
        indices: Coordinates (i, j) of the 2×2 block
        support: Interval [a, b] ⊆ [0, 1] on which the block varies
        rest: Side of the support on which the block is the identity
        angle: Rotation angle θ(x), block [[cos θ, sin θ], [−sin θ, cos θ]]
        scales: Diagonal entries (s_i(x), s_j(x)) of a scale block
    """

    kind: str
    indices: tuple[int, int]
    support: tuple[float, float]
    rest: str = "above"
    angle: Expression | None = None
    scales: tuple[Expression, Expression] | None = None

    def __post_init__(self) -> None:
        a, b = self.support
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError(f"Support [{a}, {b}] must lie in [0, 1]")
        if self.rest not in REST_SIDES:
            raise ValueError(f"rest must be one of {REST_SIDES}, got {self.rest!r}")
        i, j = self.indices
        if i == j or min(i, j) < 0:
            raise ValueError(f"Invalid block indices {self.indices}")
        if self.kind == ROTATION and self.angle is None:
            raise ValueError("A rotation segment needs an angle expression")
        if self.kind == DIAGONAL and (self.scales is None or len(self.scales) != 2):
            raise ValueError("A diagonal segment needs two scale expressions")
        if self.kind not in (ROTATION, DIAGONAL):
            raise ValueError(f"Unknown segment kind {self.kind!r}")

    @property
    def rest_endpoint(self) -> float:
        return self.support[1] if self.rest == "above" else self.support[0]

    def blocks(self, x: np.ndarray) -> np.ndarray:
        """The 2×2 block at every x, shape (len(x), 2, 2)."""
        a, b = self.support
        if self.rest == "above":
            active = x <= b
            x_eff = np.clip(x, a, b)
        else:
            active = x >= a
            x_eff = np.clip(x, a, b)

        out = np.zeros((len(x), 2, 2), dtype=complex)
        out[:, 0, 0] = out[:, 1, 1] = 1.0
        if not np.any(active):
            return out
        values = self.values(x_eff[active])
        out[active] = values
        return out

    def values(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros((len(x), 2, 2), dtype=complex)
        if self.kind == ROTATION:
            theta = self.angle(x)
            if np.max(np.abs(theta.imag), initial=0.0) > 1e-12:
                raise ExpressionError(f"Rotation angle {self.angle.source!r} is not real")
            theta = theta.real
            c, s = np.cos(theta), np.sin(theta)
            out[:, 0, 0], out[:, 0, 1] = c, s
            out[:, 1, 0], out[:, 1, 1] = -s, c
        else:
            out[:, 0, 0] = self.scales[0](x)
            out[:, 1, 1] = self.scales[1](x)
        return out

    def apply(self, stack: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Conjugate every matrix of the stack by this segment's block."""
        i, j = self.indices
        blocks = self.blocks(x)
        right = blocks.transpose(0, 2, 1)
        if self.kind == ROTATION:
            right = right.conj()
        idx = [i, j]
        out = stack.copy()
        out[:, idx, :] = blocks @ out[:, idx, :]
        out[:, :, idx] = out[:, :, idx] @ right
        return out


@dataclass(frozen=True)
class GeneratorSpec:
    """A parametric path: initial diagonal plus ordered block segments.

    Attributes:
        dim: Matrix size
        initial_diagonal: One expression per diagonal entry
        segments: Block segments, innermost first
        tail_bound: Declared norm of the discarded tail
        name: Optional label used in reports
    """

    dim: int
    initial_diagonal: tuple[Expression, ...]
    segments: tuple[Segment, ...] = ()
    tail_bound: float = 0.0
    name: str = ""

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if len(self.initial_diagonal) != self.dim:
            raise ValueError(
                f"initial_diagonal has {len(self.initial_diagonal)} entries, expected {self.dim}"
            )
        for seg in self.segments:
            if max(seg.indices) >= self.dim:
                raise ValueError(f"Segment indices {seg.indices} outside dim {self.dim}")


def _check_continuity(spec: GeneratorSpec, tol: float) -> None:
    for number, seg in enumerate(spec.segments):
        at_rest = seg.rest_endpoint
        block = seg.values(np.array([at_rest]))[0]
        defect = float(np.max(np.abs(block - np.eye(2))))
        if defect > tol:
            raise DiscontinuousSegment(number, at_rest, defect)


def evaluate_generator(
    spec: GeneratorSpec, grid: int, settings: Settings | None = None
) -> OperatorPath:
    """Sample a generator on the grid x_g = g/G.

    Args:
        spec: The generator
        grid: Grid size G (number of steps)
        settings: Numerical settings

    Returns:
        The validated path; is_loop is set iff the endpoint samples agree

    Raises:
        ValueError: If grid < 2
        ExpressionError: On expressions that fail to evaluate
        DiscontinuousSegment: If a segment is not the identity at its rest endpoint
        NotNormal: If a sample fails validation
    """
    settings = resolve(settings)
    if grid < 2:
        raise ValueError(f"Grid size must be at least 2, got {grid}")
    _check_continuity(spec, settings.normality_tol)

    x = np.arange(grid + 1) / grid
    stack = np.zeros((grid + 1, spec.dim, spec.dim), dtype=complex)
    for k, expr in enumerate(spec.initial_diagonal):
        stack[:, k, k] = expr(x)
    for seg in spec.segments:
        stack = seg.apply(stack, x)

    path = OperatorPath.from_matrices(
        stack, is_loop=None, tail_bound=spec.tail_bound, settings=settings
    )
    logger.info(
        "evaluated generator %s: dim=%d G=%d loop=%s",
        spec.name or "<anonymous>",
        spec.dim,
        grid,
        path.is_loop,
    )
    return path
