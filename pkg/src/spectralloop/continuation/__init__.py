"""Eigenvalue continuation along paths and loops.

This module provides:
- braid: Certified eigenvalue tracks, loop monodromy and condition (1)
- sections: Transported eigenvector sections, the diagonalizing family and
  the condition (2) witness
"""

from spectralloop.continuation.braid import (
    Condition1Failure,
    Condition1Report,
    EigenBraid,
    Track,
    check_condition1,
    cycles,
    monodromy,
    trace_braid,
)
from spectralloop.continuation.sections import (
    Condition2Witness,
    FramedBraid,
    build_condition2_sequence,
    diagonalize_path,
    frame_transport,
    nesting_defect,
    recover_diagonal,
)

__all__ = [
    "Condition1Failure",
    "Condition1Report",
    "Condition2Witness",
    "EigenBraid",
    "FramedBraid",
    "Track",
    "build_condition2_sequence",
    "check_condition1",
    "cycles",
    "diagonalize_path",
    "frame_transport",
    "monodromy",
    "nesting_defect",
    "recover_diagonal",
    "trace_braid",
]
