"""Reading and writing series as CSV files.

A dataset file has a header row and one row per time point. Sphere and
Euclidean rows hold the ambient coordinates; SPD rows hold the row-major
upper triangle of the matrix. The manifold is declared by flags or by a
sidecar `<csv>.manifest` holding `manifold=` and `ambient_dim=` lines.

The module includes the following functions:
- `ingest`: Parses and validates a dataset file into a `ManifoldSeries`.
- `sqrt_compose`: Maps compositions to the sphere by elementwise square root.
- `write_series`: Writes a series and its manifest.

Typical usage example:

    series = ingest("cells.csv", manifold="sphere", compositional=True)
    write_series(series, "copy.csv")
"""

import pathlib
from typing import Optional, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values, set_key

from manistat.exceptions import InvalidInputError
from manistat.geometry import ManifoldDescriptor, ManifoldKind, ManifoldSeries
from manistat.utils import get_logger

logger = get_logger(__name__)

MIN_LENGTH = 8
SPHERE_RENORM_TOL = 1e-6
COMPOSITION_SUM_TOL = 1e-6

PathLike = Union[str, pathlib.Path]


def manifest_path(path: PathLike) -> pathlib.Path:
    path = pathlib.Path(path)
    return path.with_name(path.name + ".manifest")


def read_manifest(path: PathLike) -> dict[str, str]:
    sidecar = manifest_path(path)
    if not sidecar.is_file():
        return {}
    return {k: v for k, v in dotenv_values(sidecar).items() if v is not None}


def resolve_descriptor(
    path: PathLike,
    manifold: Optional[str] = None,
    ambient_dim: Optional[int] = None,
    n_columns: Optional[int] = None,
) -> ManifoldDescriptor:
    """Flags win over the manifest; a missing dimension is read off the columns."""
    manifest = read_manifest(path)
    kind = manifold or manifest.get("manifold")
    if kind is None:
        raise InvalidInputError(
            f"no manifold declared for {path}: pass --manifold or add "
            f"{manifest_path(path).name}"
        )
    try:
        kind = ManifoldKind(kind)
    except ValueError:
        raise InvalidInputError(f"unknown manifold {kind!r}") from None
    dim = ambient_dim or manifest.get("ambient_dim")
    if dim is None and n_columns is not None:
        if kind is ManifoldKind.spd:
            dim = int((np.sqrt(8 * n_columns + 1) - 1) / 2)
        else:
            dim = n_columns
    if dim is None:
        raise InvalidInputError(f"no ambient dimension declared for {path}")
    try:
        dim = int(dim)
    except ValueError:
        raise InvalidInputError(f"ambient_dim must be an integer, got {dim!r}") from None
    return ManifoldDescriptor.from_kind(kind, dim)


def _read_table(path: PathLike) -> np.ndarray:
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise InvalidInputError(f"dataset {path} does not exist") from None
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise InvalidInputError(f"malformed CSV {path}: {e}") from None
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad)) + 1
        raise InvalidInputError(
            f"row {row} of {path} has missing or non-numeric entries", index=row
        )
    return numeric.to_numpy(dtype=float)


def _spd_columns(n: int) -> list[str]:
    rows, cols = np.triu_indices(n)
    return [f"a{j + 1}{k + 1}" for j, k in zip(rows, cols)]


def _rows_to_points(table: np.ndarray, descriptor: ManifoldDescriptor) -> np.ndarray:
    n = descriptor.ambient_dim
    if descriptor.kind is not ManifoldKind.spd:
        return table
    rows, cols = np.triu_indices(n)
    points = np.zeros((len(table), n, n))
    points[:, rows, cols] = table
    points[:, cols, rows] = table
    return points


def _renormalize_sphere(points: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(points, axis=-1)
    off = np.abs(norms - 1.0) > SPHERE_RENORM_TOL
    if off.any():
        row = int(np.argmax(off)) + 1
        raise InvalidInputError(
            f"row {row} has norm {norms[row - 1]:.6g}, not on the unit sphere",
            index=row,
        )
    return points / norms[:, None]


def sqrt_compose(proportions) -> ManifoldSeries:
    """Square-root transform of compositions onto the positive orthant of a sphere.

    Args:
        proportions: (T, D) array of nonnegative rows that each sum to 1.

    Returns:
        A series on S^{D-1} whose rows have unit norm.

    Raises:
        InvalidInputError: on negative entries or rows that do not sum to 1.
    """
    proportions = np.asarray(proportions, dtype=float)
    if proportions.ndim != 2 or proportions.shape[1] < 2:
        raise InvalidInputError("compositions must be a (T, D) array with D >= 2")
    negative = (proportions < 0).any(axis=1)
    if negative.any():
        row = int(np.argmax(negative)) + 1
        raise InvalidInputError(f"row {row} has negative proportions", index=row)
    sums = proportions.sum(axis=1)
    off = np.abs(sums - 1.0) > COMPOSITION_SUM_TOL
    if off.any():
        row = int(np.argmax(off)) + 1
        raise InvalidInputError(
            f"row {row} sums to {sums[row - 1]:.8g}, not 1", index=row
        )
    roots = np.sqrt(proportions)
    roots /= np.linalg.norm(roots, axis=1, keepdims=True)
    descriptor = ManifoldDescriptor.sphere(proportions.shape[1] - 1)
    return ManifoldSeries(descriptor=descriptor, points=roots)


def ingest(
    path: PathLike,
    manifold: Optional[str] = None,
    ambient_dim: Optional[int] = None,
    compositional: bool = False,
) -> ManifoldSeries:
    """Parses a dataset file into a validated series.

    Raises:
        InvalidInputError: on malformed files, mismatched columns, too few
            rows or rows that are not on the manifold (with the row number).
    """
    table = _read_table(path)
    if len(table) < MIN_LENGTH:
        raise InvalidInputError(
            f"{path} has {len(table)} rows; at least {MIN_LENGTH} are needed"
        )
    if compositional:
        if manifold not in (None, ManifoldKind.sphere.value):
            raise InvalidInputError("compositional data always maps to the sphere")
        series = sqrt_compose(table)
        logger.info(f"read {len(series)} compositions from {path}")
        return series

    descriptor = resolve_descriptor(path, manifold, ambient_dim, table.shape[1])
    expected = (
        len(_spd_columns(descriptor.ambient_dim))
        if descriptor.kind is ManifoldKind.spd
        else descriptor.ambient_dim
    )
    if table.shape[1] != expected:
        raise InvalidInputError(
            f"{path} has {table.shape[1]} columns, {descriptor.label()} needs {expected}"
        )
    points = _rows_to_points(table, descriptor)
    if descriptor.kind is ManifoldKind.sphere:
        points = _renormalize_sphere(points)
    series = ManifoldSeries(descriptor=descriptor, points=points)
    logger.info(f"read {len(series)} points on {descriptor.label()} from {path}")
    return series


def series_frame(series: ManifoldSeries) -> pd.DataFrame:
    descriptor = series.descriptor
    if descriptor.kind is ManifoldKind.spd:
        n = descriptor.ambient_dim
        rows, cols = np.triu_indices(n)
        return pd.DataFrame(series.points[:, rows, cols], columns=_spd_columns(n))
    columns = [f"x{j + 1}" for j in range(descriptor.ambient_dim)]
    return pd.DataFrame(series.points, columns=columns)


def write_series(series: ManifoldSeries, path: PathLike) -> pathlib.Path:
    """Writes the series at full precision plus its manifest sidecar."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    series_frame(series).to_csv(path, index=False, float_format="%.17g")
    sidecar = manifest_path(path)
    sidecar.write_text("")
    set_key(sidecar, "manifold", series.descriptor.kind.value, quote_mode="never")
    set_key(
        sidecar, "ambient_dim", str(series.descriptor.ambient_dim), quote_mode="never"
    )
    return path
