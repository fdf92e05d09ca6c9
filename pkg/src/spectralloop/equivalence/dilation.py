"""Truncation rank, unitary dilation and the final intertwiner.

The lifted loop W is compressed to the top-left m × m block U′, which is a
contraction. The block dilation

    U″ = [[U′, (I − U′U′*)^{1/2}], [−(I − U′*U′)^{1/2}, U′*]]

is unitary, and U = diag(U″, I) conjugates A into B up to 37/n.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from spectralloop.config import Settings, resolve
from spectralloop.errors import BoundViolated, NoFeasibleM, NotAContraction, SizeMismatch
from spectralloop.linalg import embed, operator_norm, operator_norms, unitarity_defect
from spectralloop.operators.model import OperatorPath
from spectralloop.spectral.sqrt import psd_sqrt

logger = logging.getLogger(__name__)

CERTIFICATE = 37.0
INEQUALITIES = (
    "conjugated compression",
    "compression of A_n",
    "compression of B_n",
    "defect root",
    "right support of A_n",
    "left support of A_n",
)


def _adjoint(stack: np.ndarray) -> np.ndarray:
    return stack.conj().transpose(0, 2, 1)


def _compression_error(matrices: np.ndarray, m: int) -> np.ndarray:
    compressed = np.zeros_like(matrices)
    compressed[:, :m, :m] = matrices[:, :m, :m]
    return operator_norms(matrices - compressed)


def measure_truncation(
    w: np.ndarray,
    an: OperatorPath,
    bn: OperatorPath,
    m: int,
    settings: Settings | None = None,
) -> np.ndarray:
    """Left-hand sides of the six truncation inequalities at rank m.

    Returns:
        Array (6, G + 1), rows in the order of INEQUALITIES
    """
    settings = resolve(settings)
    u = w[:, :m, :m]
    a = an.matrices[:, :m, :m]
    b = bn.matrices[:, :m, :m]
    uh = _adjoint(u)
    eye = np.eye(m)
    defect = eye - uh @ u
    root_gap = np.array([operator_norm(d - psd_sqrt(d, settings)) for d in defect])
    return np.stack(
        [
            operator_norms(u @ a @ uh - b),
            _compression_error(an.matrices, m),
            _compression_error(bn.matrices, m),
            root_gap,
            operator_norms(u @ a - u @ a @ uh @ u),
            operator_norms(a @ uh - uh @ u @ a @ uh),
        ]
    )


def truncation_limits(n: int, norm_a: float, norm_b: float, tail: float) -> np.ndarray:
    """Right-hand sides; the declared tail is charged to the two compressions."""
    level = 1.0 / n
    total = norm_a + norm_b
    root = level / total if total > 0 else level
    return np.array([level, level - tail, level - tail, root, level, level])


@dataclass(frozen=True)
class TruncationChoice:
    """Chosen rank with the measured inequalities.

    Attributes:
        m: Truncation rank
        measured: Array (6, G + 1) of left-hand sides at m
        limits: The six right-hand sides
    """

    m: int
    measured: np.ndarray = field(repr=False)
    limits: np.ndarray

    @property
    def slack(self) -> np.ndarray:
        """limit − max_g measured, per inequality."""
        return self.limits - np.max(self.measured, axis=1)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "slack": {name: float(s) for name, s in zip(INEQUALITIES, self.slack, strict=True)},
        }


def choose_truncation(
    w: np.ndarray,
    an: OperatorPath,
    bn: OperatorPath,
    n: int,
    norm_a: float,
    norm_b: float,
    tail: float = 0.0,
    settings: Settings | None = None,
) -> TruncationChoice:
    """Smallest window rank m satisfying all six inequalities at every grid point.

    Ranks 1, 2, 4, … are tried until one is feasible, then the last gap is
    bisected. The search assumes feasibility is monotone in m.

    Args:
        w: Lifted loop, shape (G + 1, dim, dim)
        an: Āₙ
        bn: B̄ₙ
        n: Level
        norm_a: max ‖Ā‖
        norm_b: max ‖B̄‖
        tail: Declared tail of Ā and B̄
        settings: Numerical settings

    Raises:
        NoFeasibleM: If the full window does not satisfy the inequalities,
            in particular when tail ≥ 1/n
    """
    settings = resolve(settings)
    dim = an.dim
    limits = truncation_limits(n, norm_a, norm_b, tail)
    if tail >= 1.0 / n:
        raise NoFeasibleM(n, dim, f"(declared tail {tail:.3e} is at least 1/n)")

    def feasible(m: int) -> tuple[bool, np.ndarray]:
        measured = measure_truncation(w, an, bn, m, settings)
        ok = bool(np.all(np.max(measured, axis=1) < limits))
        logger.debug("truncation trial m=%d feasible=%s", m, ok)
        return ok, measured

    lo, hi = 0, 1
    found = None
    while found is None:
        ok, measured = feasible(hi)
        if ok:
            found = measured
        elif hi == dim:
            worst = int(np.argmax(np.max(measured, axis=1) - limits))
            raise NoFeasibleM(n, dim, f"({INEQUALITIES[worst]} fails at full rank)")
        else:
            lo, hi = hi, min(2 * hi, dim)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        ok, measured = feasible(mid)
        if ok:
            hi, found = mid, measured
        else:
            lo = mid
    logger.info("truncation rank m(%d) = %d", n, hi)
    return TruncationChoice(hi, found, limits)


def block_dilation(u_prime: np.ndarray, settings: Settings | None = None) -> np.ndarray:
    """Unitary 2m × 2m dilation of a contraction.

    Raises:
        NotAContraction: If ‖U′‖ > 1 + τ
        BoundViolated: If the result misses unitarity by more than 10τ
    """
    settings = resolve(settings)
    u = np.asarray(u_prime, dtype=complex)
    tol = settings.tolerance_for(1.0)
    norm = operator_norm(u)
    if norm > 1.0 + tol:
        raise NotAContraction(norm)
    m = u.shape[0]
    eye = np.eye(m)
    uh = u.conj().T
    out = np.empty((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = u
    out[:m, m:] = psd_sqrt(eye - u @ uh, settings)
    out[m:, :m] = -psd_sqrt(eye - uh @ u, settings)
    out[m:, m:] = uh
    defect = unitarity_defect(out)
    if defect > 10 * tol:
        raise BoundViolated(defect, 10 * tol, "unitarity of the dilation")
    return out


@dataclass(frozen=True)
class IntertwinerPath:
    """Unitaries U(x_g) = diag(U″(x_g), I).

    Attributes:
        samples: Array (G + 1, D, D) with D = max(dim, 2m)
        block_rank: 2m
        bound_achieved: max_g ‖U Ā U* − B̄‖
        target: 37/n
    """

    samples: np.ndarray = field(repr=False)
    block_rank: int
    bound_achieved: float
    target: float


@dataclass(frozen=True)
class EquivalenceReport:
    """Certificate of approximate unitary equivalence at level n.

    Attributes:
        n: Level
        s_n: Rank of the lifted loop
        m_n: Truncation rank
        x: Grid
        residuals: ‖U Ā U* − B̄‖ per grid point
        target: 37/n
        an_deviation: ‖Āₙ − Ā‖ per grid point, when known
        bn_deviation: ‖B̄ₙ − B̄‖ per grid point, when known
        truncation: The truncation choice, when known
        plan: Summary of the approximation plan, when known
    """

    n: int
    s_n: int
    m_n: int
    x: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    target: float
    an_deviation: np.ndarray | None = field(default=None, repr=False)
    bn_deviation: np.ndarray | None = field(default=None, repr=False)
    truncation: TruncationChoice | None = None
    plan: dict | None = None

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    @property
    def success(self) -> bool:
        return self.max_residual < self.target

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "s_n": self.s_n,
            "m_n": self.m_n,
            "grid": len(self.x) - 1,
            "max_residual": self.max_residual,
            "target": self.target,
            "success": self.success,
        }
        if self.an_deviation is not None:
            out["max_an_deviation"] = float(np.max(self.an_deviation))
        if self.bn_deviation is not None:
            out["max_bn_deviation"] = float(np.max(self.bn_deviation))
        if self.truncation is not None:
            out["truncation"] = self.truncation.to_dict()
        if self.plan is not None:
            out["plan"] = self.plan
        return out

    def rows(self) -> list[dict]:
        """One record per grid point for residuals.csv."""
        rows = []
        for g, x in enumerate(self.x):
            row = {"x": float(x), "residual": float(self.residuals[g])}
            if self.an_deviation is not None:
                row["an_deviation"] = float(self.an_deviation[g])
            if self.bn_deviation is not None:
                row["bn_deviation"] = float(self.bn_deviation[g])
            rows.append(row)
        return rows


def assemble_intertwiner(
    w: np.ndarray,
    m: int,
    a: OperatorPath,
    b: OperatorPath,
    n: int,
    settings: Settings | None = None,
    strict: bool = True,
) -> tuple[IntertwinerPath, EquivalenceReport]:
    """Dilate the compressed lift and certify it against the original A and B.

    Args:
        w: Lifted loop, shape (G + 1, dim, dim)
        m: Truncation rank
        a: Original Ā
        b: Original B̄
        n: Level
        settings: Numerical settings
        strict: Raise when the 37/n certificate is not met

    Returns:
        The intertwiner and its report

    Raises:
        ValueError: If m is out of range
        SizeMismatch: If the paths and the lift disagree in size
        NotAContraction: If a compressed sample is not a contraction
        BoundViolated: If U does not close up, or (strict) the certificate fails
    """
    settings = resolve(settings)
    dim = a.dim
    if b.dim != dim or w.shape[1] != dim:
        raise SizeMismatch(dim, b.dim if b.dim != dim else w.shape[1])
    if not 1 <= m <= dim:
        raise ValueError(f"m must be in 1..{dim}, got {m}")
    size = max(dim, 2 * m)
    samples = np.empty((w.shape[0], size, size), dtype=complex)
    for g in range(w.shape[0]):
        unitary = np.eye(size, dtype=complex)
        unitary[: 2 * m, : 2 * m] = block_dilation(w[g, :m, :m], settings)
        samples[g] = unitary

    tol = settings.tolerance_for(1.0)
    if a.is_loop:
        closure = operator_norm(samples[-1] - samples[0])
        if closure > tol:
            raise BoundViolated(closure, tol, "closure of U")

    padded_a = np.stack([embed(x, size) for x in a.matrices])
    padded_b = np.stack([embed(x, size) for x in b.matrices])
    residuals = operator_norms(samples @ padded_a @ _adjoint(samples) - padded_b)
    target = CERTIFICATE / n
    achieved = float(np.max(residuals))
    s_n = int(round(float(np.trace(w[0].conj().T @ w[0]).real)))
    report = EquivalenceReport(n, s_n, m, a.x, residuals, target)
    path = IntertwinerPath(samples, 2 * m, achieved, target)
    logger.info("certificate: max residual %.3e against 37/%d = %.3e", achieved, n, target)
    if strict and not report.success:
        raise BoundViolated(achieved, target, "‖U A U* − B‖")
    return path, report
