"""Operator-valued paths and loops.

This module provides the discretized path model and its sources:
- model: OperatorPath, sample validation and finite-rank truncation
- generator: Parametric generators built from block segments
- examples: Built-in generators for the shift loop and the collapse path
- io: JSON path and generator files
"""

from spectralloop.operators.examples import (
    collapse_modulus,
    collapse_path_spec,
    rotating_diagonal_path,
    shift_loop_spec,
)
from spectralloop.operators.generator import GeneratorSpec, Segment, evaluate_generator
from spectralloop.operators.io import dump_generator, dump_path, load_generator, load_path
from spectralloop.operators.model import (
    OperatorPath,
    OperatorSample,
    TailIndex,
    conjugate_path,
    tail_index,
    truncate_path,
    unroll_loop,
    validate_sample,
)

__all__ = [
    "GeneratorSpec",
    "OperatorPath",
    "OperatorSample",
    "Segment",
    "TailIndex",
    "collapse_modulus",
    "collapse_path_spec",
    "conjugate_path",
    "dump_generator",
    "dump_path",
    "evaluate_generator",
    "load_generator",
    "load_path",
    "rotating_diagonal_path",
    "shift_loop_spec",
    "tail_index",
    "truncate_path",
    "unroll_loop",
    "validate_sample",
]
