"""Exception hierarchy for spectralloop.

Every diagnostic raised by the library derives from SpectralLoopError and
carries an ``exit_code`` class attribute, which the command-line front end
uses as its exit status.
"""


class SpectralLoopError(Exception):
    """Base class for all spectralloop diagnostics."""

    exit_code = 9


class InputError(SpectralLoopError):
    """The input lies outside the standing hypotheses or cannot be read."""


class SpectralError(SpectralLoopError):
    """A spectral computation cannot be certified."""

    exit_code = 5


class ContinuationError(SpectralLoopError):
    """Eigenvalue continuation along the grid failed."""


class GeometryError(SpectralLoopError):
    """A projection-triple operation was called outside its chart."""


class ApproximationError(SpectralLoopError):
    """The finite-rank approximation could not be built."""

    exit_code = 8


class EquivalenceError(SpectralLoopError):
    """The intertwiner construction failed."""


# Input errors


class NotNormal(InputError):
    """A sample fails the normality test ‖MM* − M*M‖ ≤ tol."""

    exit_code = 3

    def __init__(self, residual: float, tol: float, index: int | None = None) -> None:
        self.residual = residual
        self.tol = tol
        self.index = index
        where = "" if index is None else f" at grid index {index}"
        super().__init__(f"Sample{where} is not normal: residual {residual:.3e} > {tol:.3e}")


class ExpressionError(InputError):
    """Malformed expression text, annotated with its position."""

    exit_code = 2

    def __init__(self, message: str, line: int = 1, column: int = 1) -> None:
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class PathFormatError(InputError):
    """A path or generator file does not follow the documented JSON layout."""

    exit_code = 2


class DiscontinuousSegment(InputError):
    """A generator segment is not the identity at its resting support endpoint."""

    def __init__(self, segment: int, endpoint: float, defect: float) -> None:
        self.segment = segment
        self.endpoint = endpoint
        self.defect = defect
        super().__init__(
            f"Segment {segment} differs from the identity by {defect:.3e} at x = {endpoint:.6g}"
        )


class NotALoop(InputError):
    """A loop operation was applied to a path whose endpoints differ."""

    exit_code = 6


class SizeMismatch(InputError):
    """Two objects that must share a size do not."""

    exit_code = 7

    def __init__(self, left: int, right: int) -> None:
        self.left = left
        self.right = right
        super().__init__(f"Size mismatch: {left} != {right}")


class NotHermitian(InputError):
    """A matrix expected to be Hermitian is not."""

    def __init__(self, residual: float) -> None:
        self.residual = residual
        super().__init__(f"Matrix is not Hermitian: ‖M − M*‖ = {residual:.3e}")


class NegativeEigenvalue(InputError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, value: float) -> None:
        self.value = value
        super().__init__(f"Matrix has a negative eigenvalue {value:.3e}")


# Spectral errors


class MultiplicityViolation(SpectralError):
    """Two retained eigenvalues coincide within delta_min."""

    def __init__(self, i: int, j: int, gap: float) -> None:
        self.i = i
        self.j = j
        self.gap = gap
        super().__init__(f"Eigenvalues {i} and {j} are not separated: gap {gap:.3e}")


class ContourHitsSpectrum(SpectralError):
    """The integration circle passes too close to an eigenvalue."""

    def __init__(self, distance: float, margin: float) -> None:
        self.distance = distance
        self.margin = margin
        super().__init__(f"Contour is {distance:.3e} from the spectrum (margin {margin:.3e})")


class QuadratureNotConverged(SpectralError):
    """Doubling the quadrature nodes kept changing the projection."""

    def __init__(self, nodes: int, change: float) -> None:
        self.nodes = nodes
        self.change = change
        super().__init__(f"Quadrature not converged at {nodes} nodes: change {change:.3e}")


# Continuation errors


class RefineGrid(ContinuationError):
    """No certified matching exists between grid points index and index + 1."""

    exit_code = 4

    def __init__(self, index: int, reason: str = "") -> None:
        self.index = index
        self.reason = reason
        detail = f": {reason}" if reason else ""
        super().__init__(f"Grid too coarse at step {index}{detail}")


class TransportBreakdown(ContinuationError):
    """An eigenvector section lost more than half of its length in one step."""

    exit_code = 4

    def __init__(self, track: int, index: int, overlap: float) -> None:
        self.track = track
        self.index = index
        self.overlap = overlap
        super().__init__(f"Transport of track {track} broke down at step {index}: {overlap:.3e}")


class SpanDeficient(ContinuationError):
    """The sections at a grid point do not span the retained subspace."""

    def __init__(self, index: int, detail: str = "") -> None:
        self.index = index
        super().__init__(f"Sections are span deficient at grid index {index} {detail}".strip())


class Condition1Missing(ContinuationError):
    """An operation requiring full eigenvalue tracks got a failing braid."""

    exit_code = 6


class NoCertifiedClosure(ContinuationError):
    """Loop closure matching could not be certified."""

    exit_code = 6

    def __init__(self, track: int | None = None, detail: str = "") -> None:
        self.track = track
        what = "" if track is None else f" for track {track}"
        super().__init__(f"No certified closure{what} {detail}".strip())


# Geometry errors


class TooFar(GeometryError):
    """Projection transport between projections at distance ≥ 1."""

    def __init__(self, distance: float) -> None:
        self.distance = distance
        super().__init__(f"Projections are too far apart for transport: {distance:.3e}")


class PreconditionViolated(GeometryError):
    """A chart operation was called with triples too far from the chart center."""


class NotIntertwining(GeometryError):
    """A matrix fails to intertwine the families of a triple."""

    def __init__(self, residual: float) -> None:
        self.residual = residual
        super().__init__(f"Matrix does not intertwine the triple: residual {residual:.3e}")


# Approximation errors


class EmptySn(ApproximationError):
    """No track reaches modulus 1/n."""

    def __init__(self, n: int) -> None:
        self.n = n
        super().__init__(f"No eigenvalue track reaches modulus 1/{n}")


class CannotSeparate(ApproximationError):
    """Colliding modified eigenvalue tracks could not be pushed apart."""

    def __init__(self, track: int, index: int) -> None:
        self.track = track
        self.index = index
        super().__init__(f"Cannot separate track {track} at grid index {index}")


class BoundViolated(SpectralLoopError):
    """A certified bound was measured above its target."""

    def __init__(self, measured: float, target: float, what: str = "bound") -> None:
        self.measured = measured
        self.target = target
        super().__init__(f"{what} violated: measured {measured:.6g} >= target {target:.6g}")


# Equivalence errors


class SpectraMismatch(EquivalenceError):
    """Retained spectra of the two paths differ at a grid point."""

    exit_code = 7

    def __init__(self, index: int, gap: float) -> None:
        self.index = index
        self.gap = gap
        super().__init__(f"Retained spectra differ at grid index {index}: gap {gap:.3e}")


class ChartTooCoarse(EquivalenceError):
    """Consecutive projection triples are not within one chart."""

    exit_code = 4

    def __init__(self, index: int, distance: float) -> None:
        self.index = index
        self.distance = distance
        super().__init__(f"Triples at step {index} are {distance:.3e} apart (need < 1/4)")


class ClosureDefectNotDiagonal(EquivalenceError):
    """The closure defect of the lifted loop is not a diagonal gauge."""

    def __init__(self, residual: float) -> None:
        self.residual = residual
        super().__init__(f"Closure defect is not a diagonal gauge: residual {residual:.3e}")


class NoFeasibleM(EquivalenceError):
    """No truncation rank within the window satisfies the inequality suite."""

    exit_code = 8

    def __init__(self, n: int, dim: int, detail: str = "") -> None:
        self.n = n
        self.dim = dim
        message = f"No feasible truncation rank for n = {n} within dim {dim} {detail}"
        super().__init__(message.strip())


class NotAContraction(EquivalenceError):
    """A dilation was requested for a matrix of norm above one."""

    def __init__(self, norm: float) -> None:
        self.norm = norm
        super().__init__(f"Matrix is not a contraction: norm {norm:.6g}")
