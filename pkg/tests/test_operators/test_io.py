"""Tests for JSON path and generator files."""

import json

import numpy as np
import pytest


class TestPathFiles:
    """Test sample-based path files."""

    def test_round_trip(self, tmp_path):
        """dump_path then load_path keeps every sample bit for bit."""
        from spectralloop.operators import (
            dump_path,
            evaluate_generator,
            load_path,
            shift_loop_spec,
        )

        path = evaluate_generator(shift_loop_spec(1), 12)
        target = tmp_path / "loop.json"
        dump_path(path, target)
        again = load_path(target)

        assert np.array_equal(again.matrices, path.matrices)
        assert again.is_loop == path.is_loop
        assert again.tail_bound == path.tail_bound

    def test_minimal_document(self, tmp_path):
        """A hand-written two-by-two path loads."""
        from spectralloop.operators import load_path

        doc = {
            "dim": 2,
            "samples": [
                [[1, 0], [0, 0], [0, 0], [0, 1]],
                [[2, 0], [0, 0], [0, 0], [0, 1]],
                [[1, 0], [0, 0], [0, 0], [0, 1]],
            ],
        }
        target = tmp_path / "p.json"
        target.write_text(json.dumps(doc))
        path = load_path(target)

        assert path.grid_size == 2
        assert path.is_loop
        assert path.matrices[1, 1, 1] == 1j

    def test_empty_file(self, tmp_path):
        """An empty file is a format error."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_path

        target = tmp_path / "empty.json"
        target.write_text("")

        with pytest.raises(PathFormatError):
            load_path(target)

    def test_not_json(self, tmp_path):
        """Text that is not JSON is a format error."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_path

        target = tmp_path / "bad.json"
        target.write_text("{dim: 2")

        with pytest.raises(PathFormatError):
            load_path(target)

    def test_missing_key(self, tmp_path):
        """Missing samples are named in the error."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_path

        target = tmp_path / "p.json"
        target.write_text(json.dumps({"dim": 2}))

        with pytest.raises(PathFormatError, match="samples"):
            load_path(target)

    def test_wrong_shape(self, tmp_path):
        """Samples with the wrong entry count are refused."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_path

        target = tmp_path / "p.json"
        target.write_text(json.dumps({"dim": 2, "samples": [[[1, 0]]] * 3}))

        with pytest.raises(PathFormatError):
            load_path(target)

    def test_grid_disagrees(self, tmp_path):
        """A declared grid must match the sample count."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_path

        sample = [[1, 0], [0, 0], [0, 0], [1, 0]]
        target = tmp_path / "p.json"
        target.write_text(json.dumps({"dim": 2, "grid": 5, "samples": [sample] * 3}))

        with pytest.raises(PathFormatError):
            load_path(target)


class TestGeneratorFiles:
    """Test generator files."""

    def test_round_trip(self, tmp_path):
        """Expressions are written as text and reparse to the same generator."""
        from spectralloop.operators import dump_generator, load_generator, shift_loop_spec

        spec = shift_loop_spec(2)
        target = tmp_path / "gen.json"
        dump_generator(spec, target, grid=32)
        again = load_generator(target)

        assert again.dim == spec.dim
        assert again.tail_bound == spec.tail_bound
        assert [e.source for e in again.initial_diagonal] == [
            e.source for e in spec.initial_diagonal
        ]
        assert [s.angle.source for s in again.segments] == [s.angle.source for s in spec.segments]

    def test_grid_from_file(self, tmp_path):
        """load_path uses the file's grid unless one is given."""
        from spectralloop.operators import dump_generator, load_path, shift_loop_spec

        target = tmp_path / "gen.json"
        dump_generator(shift_loop_spec(1), target, grid=24)

        assert load_path(target).grid_size == 24
        assert load_path(target, grid=30).grid_size == 30

    def test_numbers_as_expressions(self, tmp_path):
        """Numbers and [re, im] pairs stand for constant expressions."""
        from spectralloop.operators import load_path

        doc = {"generator": {"dim": 2, "initial_diagonal": [1.5, [0, 2]]}, "grid": 2}
        target = tmp_path / "gen.json"
        target.write_text(json.dumps(doc))

        path = load_path(target)

        assert np.allclose(path.matrices[0], np.diag([1.5, 2j]))

    def test_bad_segment(self, tmp_path):
        """A segment that fails validation is a format error."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_path

        segment = {"kind": "rotation", "indices": [0, 0], "support": [0, 1], "angle": "x"}
        doc = {"generator": {"dim": 2, "initial_diagonal": ["1", "2"], "segments": [segment]}}
        target = tmp_path / "gen.json"
        target.write_text(json.dumps(doc))

        with pytest.raises(PathFormatError):
            load_path(target)

    def test_bad_expression(self, tmp_path):
        """Malformed expression text raises ExpressionError."""
        from spectralloop.errors import ExpressionError
        from spectralloop.operators import load_path

        doc = {"generator": {"dim": 1, "initial_diagonal": ["1 +* x"]}, "grid": 2}
        target = tmp_path / "gen.json"
        target.write_text(json.dumps(doc))

        with pytest.raises(ExpressionError):
            load_path(target)

    def test_not_a_generator(self, tmp_path):
        """load_generator refuses sample files."""
        from spectralloop.errors import PathFormatError
        from spectralloop.operators import load_generator

        target = tmp_path / "p.json"
        target.write_text(json.dumps({"dim": 1, "samples": []}))

        with pytest.raises(PathFormatError):
            load_generator(target)
