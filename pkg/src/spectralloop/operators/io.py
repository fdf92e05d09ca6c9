"""JSON path and generator files.

Path file::

    {"dim": 2, "grid": 2, "loop": true, "tail_bound": 0.0,
     "samples": [[[re, im], ...], ...]}

Each sample is a row-major list of dim² [re, im] pairs. A generator file is
``{"generator": {...}, "grid": G}`` with expressions stored as text.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from spectralloop.config import Settings
from spectralloop.errors import PathFormatError
from spectralloop.expression import Expression, parse_expression
from spectralloop.operators.generator import GeneratorSpec, Segment, evaluate_generator
from spectralloop.operators.model import OperatorPath

logger = logging.getLogger(__name__)

DEFAULT_GRID = 256


def _require(data: dict, key: str, where: str) -> Any:
    if key not in data:
        raise PathFormatError(f"Missing key {key!r} in {where}")
    return data[key]


def _expression(value: Any) -> Expression:
    if isinstance(value, str):
        return parse_expression(value)
    if isinstance(value, bool):
        raise PathFormatError(f"Expected an expression or number, got {value!r}")
    if isinstance(value, int | float):
        return Expression.from_value(value)
    if isinstance(value, list) and len(value) == 2:
        return Expression.from_value(complex(value[0], value[1]))
    raise PathFormatError(f"Expected an expression or number, got {value!r}")


def generator_from_dict(data: dict) -> GeneratorSpec:
    """Build a generator from its JSON form.

    Raises:
        PathFormatError: On missing keys or malformed segments
        ExpressionError: On malformed expression text
    """
    dim = _require(data, "dim", "generator")
    diagonal = tuple(_expression(v) for v in _require(data, "initial_diagonal", "generator"))
    segments = []
    for k, raw in enumerate(data.get("segments", [])):
        where = f"segment {k}"
        kind = _require(raw, "kind", where)
        kwargs: dict[str, Any] = {
            "kind": kind,
            "indices": tuple(_require(raw, "indices", where)),
            "support": tuple(float(v) for v in _require(raw, "support", where)),
            "rest": raw.get("rest", "above"),
        }
        if kind == "rotation":
            kwargs["angle"] = _expression(_require(raw, "angle", where))
        else:
            kwargs["scales"] = tuple(_expression(v) for v in _require(raw, "scales", where))
        try:
            segments.append(Segment(**kwargs))
        except (ValueError, TypeError) as exc:
            raise PathFormatError(f"Invalid {where}: {exc}") from exc
    try:
        return GeneratorSpec(
            dim=int(dim),
            initial_diagonal=diagonal,
            segments=tuple(segments),
            tail_bound=float(data.get("tail_bound", 0.0)),
            name=str(data.get("name", "")),
        )
    except ValueError as exc:
        raise PathFormatError(f"Invalid generator: {exc}") from exc


def generator_to_dict(spec: GeneratorSpec) -> dict:
    """JSON form of a generator; expressions are written as their source text."""
    segments = []
    for seg in spec.segments:
        entry: dict[str, Any] = {
            "kind": seg.kind,
            "indices": list(seg.indices),
            "support": list(seg.support),
            "rest": seg.rest,
        }
        if seg.angle is not None:
            entry["angle"] = seg.angle.source
        if seg.scales is not None:
            entry["scales"] = [s.source for s in seg.scales]
        segments.append(entry)
    return {
        "dim": spec.dim,
        "initial_diagonal": [e.source for e in spec.initial_diagonal],
        "segments": segments,
        "tail_bound": spec.tail_bound,
        "name": spec.name,
    }


def path_from_dict(
    data: dict, grid: int | None = None, settings: Settings | None = None
) -> OperatorPath:
    """Build a path from its JSON form (samples or generator).

    Args:
        data: Parsed JSON document
        grid: Grid size for generator documents; overrides the file's "grid"
        settings: Numerical settings

    Raises:
        PathFormatError: On malformed documents
        NotNormal: If a sample is not normal
    """
    if not isinstance(data, dict):
        raise PathFormatError("Path document must be a JSON object")
    if "generator" in data:
        spec = generator_from_dict(data["generator"])
        size = grid or int(data.get("grid", DEFAULT_GRID))
        return evaluate_generator(spec, size, settings=settings)

    dim = int(_require(data, "dim", "path"))
    raw_samples = _require(data, "samples", "path")
    try:
        samples = np.array(raw_samples, dtype=float)
    except (TypeError, ValueError) as exc:
        raise PathFormatError(f"Samples are not numeric: {exc}") from exc
    if samples.ndim != 3 or samples.shape[1:] != (dim * dim, 2):
        raise PathFormatError(
            f"Samples must have shape (G+1, {dim * dim}, 2), got {samples.shape}"
        )
    if "grid" in data and int(data["grid"]) != samples.shape[0] - 1:
        raise PathFormatError(
            f"grid = {data['grid']} but the file has {samples.shape[0]} samples"
        )
    matrices = (samples[..., 0] + 1j * samples[..., 1]).reshape(-1, dim, dim)
    try:
        return OperatorPath.from_matrices(
            matrices,
            is_loop=data.get("loop"),
            tail_bound=float(data.get("tail_bound", 0.0)),
            settings=settings,
        )
    except ValueError as exc:
        raise PathFormatError(str(exc)) from exc


def path_to_dict(path: OperatorPath) -> dict:
    """JSON form of a path's samples (floats are written with full precision)."""
    flat = path.matrices.reshape(path.grid_size + 1, -1)
    samples = np.stack([flat.real, flat.imag], axis=-1)
    return {
        "dim": path.dim,
        "grid": path.grid_size,
        "loop": path.is_loop,
        "tail_bound": path.tail_bound,
        "samples": samples.tolist(),
    }


def load_path(
    source: str | Path, grid: int | None = None, settings: Settings | None = None
) -> OperatorPath:
    """Read a path or generator file.

    Raises:
        PathFormatError: If the file is empty, not JSON or malformed
    """
    text = Path(source).read_text(encoding="utf-8")
    if not text.strip():
        raise PathFormatError(f"{source} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PathFormatError(f"{source}: {exc}") from exc
    logger.debug("loading path from %s", source)
    return path_from_dict(data, grid=grid, settings=settings)


def dump_path(path: OperatorPath, target: str | Path) -> None:
    Path(target).write_text(json.dumps(path_to_dict(path)), encoding="utf-8")


def dump_generator(spec: GeneratorSpec, target: str | Path, grid: int | None = None) -> None:
    document: dict[str, Any] = {"generator": generator_to_dict(spec)}
    if grid is not None:
        document["grid"] = grid
    Path(target).write_text(json.dumps(document, indent=2), encoding="utf-8")


def load_generator(source: str | Path) -> GeneratorSpec:
    """Read the generator part of a generator file.

    Raises:
        PathFormatError: If the file holds no generator
    """
    text = Path(source).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PathFormatError(f"{source}: {exc}") from exc
    if not isinstance(data, dict) or "generator" not in data:
        raise PathFormatError(f"{source} is not a generator file")
    return generator_from_dict(data["generator"])
