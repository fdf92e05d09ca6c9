"""Tests for commands, outputs and exit codes."""

import csv
import json

import numpy as np
import pytest


def _write_path(target, matrices, loop=None):
    """Write samples in the path file format."""
    flat = np.asarray(matrices, dtype=complex).reshape(len(matrices), -1)
    document = {
        "dim": int(np.asarray(matrices[0]).shape[0]),
        "samples": np.stack([flat.real, flat.imag], axis=-1).tolist(),
    }
    if loop is not None:
        document["loop"] = loop
    target.write_text(json.dumps(document), encoding="utf-8")
    return target


def _report(capsys):
    return json.loads(capsys.readouterr().out)


class TestValidate:
    """Test the validate command."""

    def test_example(self, capsys, tmp_path):
        """A builtin loop validates and writes report.json."""
        from spectralloop.cli import main

        argv = ["validate", "--example", "shift-loop", "--window", "2", "--grid", "64"]
        code = main([*argv, "--out", str(tmp_path)])
        report = _report(capsys)

        assert code == 0
        assert report["dim"] == 5
        assert report["grid"] == 64
        assert report["loop"] is True
        assert report["tail_bound"] == pytest.approx(0.5)
        assert json.loads((tmp_path / "report.json").read_text()) == report

    def test_input_file(self, capsys, tmp_path):
        """Path files are read from --input."""
        from spectralloop.cli import main

        source = _write_path(tmp_path / "path.json", [np.diag([1.0, 0.5])] * 3)
        code = main(["validate", "--input", str(source)])
        report = _report(capsys)

        assert code == 0
        assert report["dim"] == 2
        assert report["closure_defect"] == 0.0

    def test_not_normal(self, capsys, tmp_path):
        """A non-normal sample exits with 3 and a diagnostic."""
        from spectralloop.cli import main

        shift = np.array([[0.0, 1.0], [0.0, 0.0]])
        source = _write_path(tmp_path / "path.json", [np.eye(2), shift, np.eye(2)])
        code = main(["validate", "--input", str(source)])
        report = _report(capsys)

        assert code == 3
        assert report["error"] == "NotNormal"
        assert report["exit_code"] == 3
        assert report["details"]["index"] == 1


class TestInputErrors:
    """Test exit codes of bad invocations."""

    def test_empty_file(self, capsys, tmp_path):
        """An empty file is a format error."""
        from spectralloop.cli import main

        source = tmp_path / "empty.json"
        source.write_text("")

        assert main(["validate", "--input", str(source)]) == 2
        assert _report(capsys)["error"] == "PathFormatError"

    def test_missing_file(self, capsys, tmp_path):
        """A missing file is a format error."""
        from spectralloop.cli import main

        assert main(["braid", "--input", str(tmp_path / "absent.json")]) == 2
        assert _report(capsys)["error"] == "PathFormatError"

    def test_no_source(self):
        """One of --input and --example is required."""
        from spectralloop.cli import main

        assert main(["validate"]) == 2

    def test_two_sources(self, tmp_path):
        """--input and --example exclude each other."""
        from spectralloop.cli import main

        source = _write_path(tmp_path / "path.json", [np.eye(2)] * 3)
        assert main(["validate", "--input", str(source), "--example", "shift-loop"]) == 2

    @pytest.mark.parametrize(
        "argv",
        [
            ["validate", "--example", "shift-loop", "--grid", "1"],
            ["braid", "--example", "shift-loop", "--threshold", "0"],
            ["equivalence", "--example", "shift-loop", "--n", "0"],
        ],
    )
    def test_bad_values(self, argv):
        """Out-of-range options exit with 2."""
        from spectralloop.cli import main

        assert main(argv) == 2

    def test_bad_grid_writes_diagnostic(self, capsys, tmp_path):
        """Rejected options still produce a report with exit code 2."""
        from spectralloop.cli import main

        argv = ["validate", "--example", "shift-loop", "--grid", "1", "--out", str(tmp_path)]
        code = main(argv)
        report = _report(capsys)

        assert code == 2
        assert report["error"] == "ValueError"
        assert report["exit_code"] == 2
        assert "--grid" in report["message"]
        assert json.loads((tmp_path / "report.json").read_text()) == report

    def test_repair_and_printed_exclude_each_other(self):
        """Only one formula variant can be chosen."""
        from spectralloop.cli import main

        with pytest.raises(SystemExit) as info:
            main(["validate", "--example", "collapse-path", "--repair", "--printed"])
        assert info.value.code == 2

    @pytest.mark.parametrize("command", ["validate", "braid", "check-cond1"])
    def test_seed_on_every_command(self, command):
        """--seed is accepted by every subcommand."""
        from spectralloop.cli import build_parser, config_from_args

        args = build_parser().parse_args([command, "--example", "shift-loop", "--seed", "11"])
        config = config_from_args(args)

        assert config.seed == 11
        assert config.repaired is True

    def test_repair_flag(self):
        """--repair selects the repaired formulas and --printed the literal ones."""
        from spectralloop.cli import build_parser, config_from_args

        parser = build_parser()
        repaired = parser.parse_args(["validate", "--example", "collapse-path", "--repair"])
        printed = parser.parse_args(["validate", "--example", "collapse-path", "--printed"])

        assert config_from_args(repaired).repaired is True
        assert config_from_args(printed).repaired is False

    def test_unknown_command(self):
        """argparse rejects unknown commands."""
        from spectralloop.cli import main

        with pytest.raises(SystemExit) as info:
            main(["transmogrify"])
        assert info.value.code == 2

    def test_equivalence_needs_loop(self, capsys, tmp_path):
        """Paths that are not loops exit with 6."""
        from spectralloop.cli import main

        source = _write_path(tmp_path / "path.json", [np.diag([1.0, 0.5])] * 3, loop=False)

        assert main(["equivalence", "--input", str(source)]) == 6
        assert _report(capsys)["error"] == "NotALoop"


class TestBraid:
    """Test the braid and check-cond1 commands."""

    def test_braid_csv(self, capsys, tmp_path):
        """braid.csv has one row per track and grid point."""
        from spectralloop.cli import main

        code = main(["braid", "--example", "shift-loop", "--grid", "512", "--out", str(tmp_path)])
        report = _report(capsys)

        assert code == 0
        assert len(report["tracks"]) == 9
        assert report["uncertified_steps"] == 0
        assert sorted(report["monodromy"]) == list(range(9))
        assert len(report["cycles"]) == 1
        with (tmp_path / "braid.csv").open(newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == ["x", "track", "re", "im", "abs", "certified"]
        assert len(rows) == 9 * 513
        assert all(row["certified"] == "1" for row in rows)
        first = rows[0]
        value = complex(float(first["re"]), float(first["im"]))
        assert float(first["abs"]) == pytest.approx(abs(value))

    def test_check_cond1_collapse(self, capsys):
        """A failed condition (1) still exits with 0."""
        from spectralloop.cli import main

        argv = ["check-cond1", "--example", "collapse-path", "--depth", "4", "--repair"]
        code = main([*argv, "--grid", "2048"])
        report = _report(capsys)

        assert code == 0
        assert report["command"] == "check-cond1"
        assert report["satisfied"] is False
        assert report["failures"]


class TestEquivalence:
    """Test the equivalence and strong commands."""

    @pytest.mark.slow
    def test_shift_loop(self, capsys, tmp_path):
        """The shift loop meets the certificate and writes residuals.csv."""
        from spectralloop.cli import main

        argv = ["equivalence", "--example", "shift-loop", "--grid", "512", "--n", "3"]
        code = main([*argv, "--seed", "7", "--out", str(tmp_path)])
        report = _report(capsys)

        assert code == 0
        assert report["success"] is True
        assert report["max_residual"] < 37 / 3
        with (tmp_path / "residuals.csv").open(newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == ["x", "residual", "an_deviation", "bn_deviation"]
        assert len(rows) == 513

    def test_strong(self, capsys, tmp_path):
        """A rotating path lifts onto its conjugate."""
        from spectralloop.cli import main

        argv = ["strong", "--example", "rotating-diagonal", "--dim", "3", "--grid", "512"]
        code = main([*argv, "--seed", "3", "--out", str(tmp_path)])
        report = _report(capsys)

        assert code == 0
        assert report["success"] is True
        assert report["max_residual"] <= report["bound"]
        with (tmp_path / "residuals.csv").open(newline="") as handle:
            assert sum(1 for _ in handle) == 514
