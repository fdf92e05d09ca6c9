"""
Unitary equivalence of normal loops and paths.

Modules:
    phi: Projection triples of two approximants along the grid
    lift: Intertwining partial isometries over loops and paths
    dilation: Truncation rank, block dilation and the 37/n certificate
    pipeline: End-to-end runs
"""

from spectralloop.equivalence.dilation import (
    EquivalenceReport,
    IntertwinerPath,
    TruncationChoice,
    assemble_intertwiner,
    block_dilation,
    choose_truncation,
)
from spectralloop.equivalence.lift import (
    LiftedLoop,
    StrongLift,
    lift_loop,
    lift_path,
    strong_lift_path,
)
from spectralloop.equivalence.phi import TriplePath, build_phi
from spectralloop.equivalence.pipeline import EquivalenceResult, run_equivalence, run_strong

__all__ = [
    "EquivalenceReport",
    "EquivalenceResult",
    "IntertwinerPath",
    "LiftedLoop",
    "StrongLift",
    "TriplePath",
    "TruncationChoice",
    "assemble_intertwiner",
    "block_dilation",
    "build_phi",
    "choose_truncation",
    "lift_loop",
    "lift_path",
    "run_equivalence",
    "run_strong",
    "strong_lift_path",
]
