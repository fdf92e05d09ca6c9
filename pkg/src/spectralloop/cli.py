"""Command-line front end.

Usage::

    spectralloop validate --example shift-loop --window 4 --grid 512
    spectralloop braid --input loop.json --out results/
    spectralloop check-cond1 --example collapse-path --depth 6 --repair --grid 2048
    spectralloop equivalence --example shift-loop --n 3 --seed 7 --out results/
    spectralloop strong --input a.json --input-b b.json

Every command writes ``report.json`` into ``--out`` (when given) and prints
it. The exit status is 0 on success, 1 when an equivalence certificate is
computed but not achieved, and otherwise the ``exit_code`` of the raised
diagnostic.
"""

import argparse
import csv
import json
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from spectralloop import __version__
from spectralloop.config import Settings, get_settings
from spectralloop.continuation import check_condition1, cycles, trace_braid
from spectralloop.equivalence import run_equivalence, run_strong
from spectralloop.equivalence.pipeline import strong_report
from spectralloop.errors import PathFormatError, SpectralLoopError
from spectralloop.linalg import random_unitary
from spectralloop.operators import (
    OperatorPath,
    collapse_path_spec,
    conjugate_path,
    evaluate_generator,
    load_path,
    rotating_diagonal_path,
    shift_loop_spec,
    unroll_loop,
)
from spectralloop.operators.io import DEFAULT_GRID

logger = logging.getLogger(__name__)

EXAMPLES = ("shift-loop", "collapse-path", "rotating-diagonal")
COMMANDS = ("validate", "braid", "check-cond1", "equivalence", "strong")


@dataclass(frozen=True)
class RunConfig:
    """Values of one command-line run."""

    command: str
    input: Path | None = None
    input_b: Path | None = None
    example: str | None = None
    grid: int | None = None
    n: int = 3
    threshold: float = 1e-3
    tolerance: float | None = None
    out: Path | None = None
    seed: int = 0
    window: int = 4
    depth: int = 6
    dim: int = 4
    repaired: bool = True
    verbose: int = 0

    def validate(self) -> None:
        """Check the argument invariants.

        Raises:
            ValueError: On G < 2, n < 1, nonpositive thresholds, or a
                missing or doubled input source
        """
        if self.grid is not None and self.grid < 2:
            raise ValueError(f"--grid must be at least 2, got {self.grid}")
        if self.n < 1:
            raise ValueError(f"--n must be at least 1, got {self.n}")
        if self.threshold <= 0:
            raise ValueError(f"--threshold must be positive, got {self.threshold}")
        if self.tolerance is not None and self.tolerance <= 0:
            raise ValueError(f"--tolerance must be positive, got {self.tolerance}")
        if (self.input is None) == (self.example is None):
            raise ValueError("Give exactly one of --input and --example")

    def settings(self) -> Settings:
        base = get_settings()
        return base if self.tolerance is None else base.with_tolerance(self.tolerance)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectralloop",
        description="Eigenvalue braids and unitary equivalence of normal operator loops.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = commands.add_parser(name, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        sub.add_argument("--input", type=Path, help="Path or generator file (JSON)")
        sub.add_argument("--example", choices=EXAMPLES, help="Builtin generator")
        sub.add_argument(
            "--grid", type=int, help=f"Grid size G (generators; default {DEFAULT_GRID})"
        )
        sub.add_argument("--threshold", type=float, default=1e-3, help="Frame threshold")
        sub.add_argument("--tolerance", type=float, help="Normality tolerance (overrides env)")
        sub.add_argument("--out", type=Path, help="Output directory")
        sub.add_argument("--window", type=int, default=4, help="Half-width of shift-loop")
        sub.add_argument("--depth", type=int, default=6, help="Depth of collapse-path")
        sub.add_argument("--dim", type=int, default=4, help="Size of rotating-diagonal")
        formulas = sub.add_mutually_exclusive_group()
        formulas.add_argument(
            "--repair",
            dest="repaired",
            action="store_true",
            help="Use the builtin formulas with continuity repairs (default)",
        )
        formulas.add_argument(
            "--printed",
            dest="repaired",
            action="store_false",
            help="Use the builtin formulas without continuity repairs",
        )
        sub.set_defaults(repaired=True)
        sub.add_argument("--seed", type=int, default=0, help="Seed of random unitaries")
        sub.add_argument("-v", "--verbose", action="count", default=0)
        if name in ("equivalence", "strong"):
            sub.add_argument("--input-b", type=Path, help="Second path (default: V A V*)")
        if name == "equivalence":
            sub.add_argument("--n", type=int, default=3, help="Level n of the 37/n certificate")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=args.input,
        input_b=getattr(args, "input_b", None),
        example=args.example,
        grid=args.grid,
        n=getattr(args, "n", 3),
        threshold=args.threshold,
        tolerance=args.tolerance,
        out=args.out,
        seed=args.seed,
        window=args.window,
        depth=args.depth,
        dim=args.dim,
        repaired=args.repaired,
        verbose=args.verbose,
    )


def load_input(config: RunConfig, settings: Settings) -> OperatorPath:
    """The primary path: a file or a builtin generator."""
    if config.input is not None:
        if not config.input.exists():
            raise PathFormatError(f"{config.input} does not exist")
        return load_path(config.input, grid=config.grid, settings=settings)
    if config.example == "shift-loop":
        spec = shift_loop_spec(config.window, config.repaired)
        return evaluate_generator(spec, config.grid or DEFAULT_GRID, settings)
    if config.example == "collapse-path":
        spec = collapse_path_spec(config.depth, config.repaired)
        return evaluate_generator(spec, config.grid or DEFAULT_GRID, settings)
    rng = np.random.default_rng(config.seed)
    eigenvalues = np.arange(1, config.dim + 1) * (1 + 0.3j) / config.dim
    generator = rng.standard_normal((config.dim, config.dim))
    generator = (generator + generator.T) / 2
    return rotating_diagonal_path(
        eigenvalues, generator, config.grid or DEFAULT_GRID, settings=settings
    )


def companion(config: RunConfig, path: OperatorPath, settings: Settings) -> OperatorPath:
    """The second path: --input-b, or the conjugate by a seeded random unitary."""
    if config.input_b is not None:
        if not config.input_b.exists():
            raise PathFormatError(f"{config.input_b} does not exist")
        return load_path(config.input_b, grid=config.grid, settings=settings)
    unitary = random_unitary(path.dim, np.random.default_rng(config.seed))
    return conjugate_path(path, unitary)


def _number(value: float) -> str:
    return f"{value:.17g}"


def write_csv(target: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with target.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_number(v) if isinstance(v, float) else v for v in row])


def emit(config: RunConfig, report: dict) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / "report.json").write_text(text + "\n", encoding="utf-8")


def cmd_validate(config: RunConfig, settings: Settings) -> int:
    path = load_input(config, settings)
    emit(
        config,
        {
            "command": "validate",
            "dim": path.dim,
            "grid": path.grid_size,
            "loop": path.is_loop,
            "closure_defect": path.closure_defect(),
            "tail_bound": path.tail_bound,
            "max_normality_residual": float(np.max(path.residuals)),
            "norm": path.norm,
        },
    )
    return 0


def cmd_braid(config: RunConfig, settings: Settings) -> int:
    path = load_input(config, settings)
    braid = trace_braid(path, config.threshold, settings)
    report = {
        "command": "braid",
        "grid": braid.grid_size,
        "threshold": braid.threshold,
        "loop": braid.is_loop,
        "tracks": [
            {"id": t.track_id, "birth": t.birth, "death": t.death, "cause": t.cause}
            for t in braid.tracks
        ],
        "uncertified_steps": int(np.count_nonzero(~braid.certified)),
    }
    if braid.monodromy is not None:
        report["monodromy"] = [int(s) for s in braid.monodromy]
        report["cycles"] = cycles(braid.monodromy)
    emit(config, report)
    if config.out is not None:
        flags = braid.point_certified()
        rows = []
        for g, x in enumerate(braid.x):
            for track in braid.tracks:
                if track.slots[g] < 0:
                    continue
                value = complex(track.values[g])
                rows.append(
                    [
                        float(x),
                        track.track_id,
                        value.real,
                        value.imag,
                        abs(value),
                        int(flags[g]),
                    ]
                )
        write_csv(config.out / "braid.csv", ["x", "track", "re", "im", "abs", "certified"], rows)
    return 0


def cmd_check_cond1(config: RunConfig, settings: Settings) -> int:
    path = load_input(config, settings)
    braid = trace_braid(path, config.threshold, settings)
    report = check_condition1(braid, path).to_dict()
    report["command"] = "check-cond1"
    emit(config, report)
    return 0


def cmd_equivalence(config: RunConfig, settings: Settings) -> int:
    a = load_input(config, settings)
    b = companion(config, a, settings)
    result = run_equivalence(a, b, config.n, config.threshold, settings)
    report = result.report.to_dict()
    report["command"] = "equivalence"
    emit(config, report)
    if config.out is not None:
        records = result.report.rows()
        header = ["x", "residual", "an_deviation", "bn_deviation"]
        write_csv(
            config.out / "residuals.csv",
            header,
            [[record[key] for key in header] for record in records],
        )
    return 0 if result.report.success else 1


def cmd_strong(config: RunConfig, settings: Settings) -> int:
    a = load_input(config, settings)
    if a.is_loop:
        a = unroll_loop(a)
    b = companion(config, a, settings)
    lift = run_strong(a, b, config.threshold, settings)
    report = strong_report(lift, a.x, config.threshold)
    report["command"] = "strong"
    emit(config, report)
    if config.out is not None:
        rows = [[float(x), float(r)] for x, r in zip(a.x, lift.residuals, strict=True)]
        write_csv(config.out / "residuals.csv", ["x", "residual"], rows)
    return 0


HANDLERS: dict[str, Callable[[RunConfig, Settings], int]] = {
    "validate": cmd_validate,
    "braid": cmd_braid,
    "check-cond1": cmd_check_cond1,
    "equivalence": cmd_equivalence,
    "strong": cmd_strong,
}


def _diagnostic(exc: Exception, exit_code: int) -> dict:
    details = {
        key: value
        for key, value in vars(exc).items()
        if isinstance(value, (int, float, str, bool)) or value is None
    }
    return {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": exit_code,
        "details": details,
    }


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit status."""
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(config.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        config.validate()
        settings = config.settings()
        return HANDLERS[config.command](config, settings)
    except SpectralLoopError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        emit(config, _diagnostic(exc, exc.exit_code))
        return exc.exit_code
    except ValueError as exc:
        logger.error("%s", exc)
        emit(config, _diagnostic(exc, 2))
        return 2


if __name__ == "__main__":
    sys.exit(main())
