"""Shared fixtures."""

import pytest

SHIFT_WINDOW = 4
SHIFT_GRID = 512


@pytest.fixture(scope="session")
def shift_loop():
    """The shift loop of window 4 at G=512 with its braid and sections."""
    from spectralloop.continuation import frame_transport, trace_braid
    from spectralloop.operators import evaluate_generator, shift_loop_spec

    path = evaluate_generator(shift_loop_spec(SHIFT_WINDOW), SHIFT_GRID)
    braid = trace_braid(path, 1e-3)
    return path, braid, frame_transport(path, braid)
