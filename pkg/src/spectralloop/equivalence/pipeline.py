"""End-to-end certificates.

run_equivalence goes from two loops to the 37/n intertwiner:

    braids → sections → plan and λ′ → Āₙ, B̄ₙ → Φ → W → m(n) → U

run_strong lifts two paths with equal spectra to a unitary path.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from spectralloop.approximation import (
    ApproximationPlan,
    align_tracks,
    assemble_an,
    assemble_bn,
    build_isometry_path,
    build_lambda_prime,
    select_plan,
)
from spectralloop.config import Settings, resolve
from spectralloop.continuation import (
    EigenBraid,
    check_condition1,
    frame_transport,
    trace_braid,
)
from spectralloop.equivalence.dilation import (
    EquivalenceReport,
    IntertwinerPath,
    assemble_intertwiner,
    choose_truncation,
)
from spectralloop.equivalence.lift import LiftedLoop, StrongLift, lift_loop, strong_lift_path
from spectralloop.equivalence.phi import build_phi
from spectralloop.errors import Condition1Missing, NotALoop, SizeMismatch
from spectralloop.linalg import operator_norms
from spectralloop.operators.model import OperatorPath

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquivalenceResult:
    """Everything built on the way to the certificate."""

    report: EquivalenceReport
    intertwiner: IntertwinerPath = field(repr=False)
    plan: ApproximationPlan = field(repr=False)
    braid_a: EigenBraid = field(repr=False)
    braid_b: EigenBraid = field(repr=False)
    an: OperatorPath = field(repr=False)
    bn: OperatorPath = field(repr=False)
    lift: LiftedLoop = field(repr=False)


def _require_condition1(braid: EigenBraid, path: OperatorPath, name: str) -> None:
    report = check_condition1(braid, path)
    if not report.satisfied:
        first = report.failures[0]
        raise Condition1Missing(
            f"{name}: track {first.track} has a {first.event} at grid index {first.index}"
        )


def run_equivalence(
    a: OperatorPath,
    b: OperatorPath,
    n: int,
    threshold: float,
    settings: Settings | None = None,
) -> EquivalenceResult:
    """Certify ‖U(x)A(x)U(x)* − B(x)‖ < 37/n for a unitary loop U.

    Args:
        a: Loop Ā
        b: Loop B̄ with the same spectra
        n: Level
        threshold: Eigenvalues of modulus ≤ threshold are not tracked
        settings: Numerical settings

    Returns:
        The result; report.success tells whether the certificate holds

    Raises:
        NotALoop: If a or b is not a loop
        SizeMismatch: If the grids or windows differ
        Condition1Missing: If either braid has births or deaths
        SpectralLoopError: Any diagnostic of the intermediate stages
    """
    settings = resolve(settings)
    if not (a.is_loop and b.is_loop):
        raise NotALoop("approximate equivalence needs two loops")
    if a.grid_size != b.grid_size:
        raise SizeMismatch(a.grid_size, b.grid_size)
    if a.dim != b.dim:
        raise SizeMismatch(a.dim, b.dim)

    braid_a = trace_braid(a, threshold, settings)
    _require_condition1(braid_a, a, "A")
    braid_b = trace_braid(b, threshold, settings)
    _require_condition1(braid_b, b, "B")
    order = align_tracks(braid_a, braid_b, settings)

    plan = build_lambda_prime(braid_a, select_plan(braid_a, n), settings)
    isometry = build_isometry_path(plan, a.dim)
    an = assemble_an(a, frame_transport(a, braid_a, settings), plan, isometry, settings)
    bn = assemble_bn(b, frame_transport(b, braid_b, settings), plan, order, isometry, settings)

    phi = build_phi(an, bn, settings.zero_tol, settings)
    lift = lift_loop(phi, settings)
    tail = max(a.tail_bound, b.tail_bound)
    truncation = choose_truncation(lift.samples, an, bn, n, a.norm, b.norm, tail, settings)
    intertwiner, report = assemble_intertwiner(
        lift.samples, truncation.m, a, b, n, settings, strict=False
    )
    report = replace(
        report,
        an_deviation=operator_norms(an.matrices - a.matrices),
        bn_deviation=operator_norms(bn.matrices - b.matrices),
        truncation=truncation,
        plan=plan.to_dict(),
    )
    level = logging.INFO if report.success else logging.WARNING
    logger.log(
        level,
        "equivalence n=%d: max residual %.3e, target %.3e, success=%s",
        n,
        report.max_residual,
        report.target,
        report.success,
    )
    return EquivalenceResult(report, intertwiner, plan, braid_a, braid_b, an, bn, lift)


def run_strong(
    a: OperatorPath,
    b: OperatorPath,
    threshold: float = 0.0,
    settings: Settings | None = None,
) -> StrongLift:
    """Unitary path conjugating A into B.

    Raises:
        SizeMismatch: If the grids or windows differ
        SpectralLoopError: Any diagnostic of strong_lift_path
    """
    if a.grid_size != b.grid_size:
        raise SizeMismatch(a.grid_size, b.grid_size)
    if a.dim != b.dim:
        raise SizeMismatch(a.dim, b.dim)
    return strong_lift_path(a, b, threshold, settings)


def strong_report(lift: StrongLift, x: np.ndarray, threshold: float) -> dict:
    """JSON summary of a strong lift."""
    return {
        "grid": len(x) - 1,
        "threshold": threshold,
        "max_residual": lift.max_residual,
        "bound": lift.bound,
        "success": lift.max_residual <= lift.bound,
    }
