"""This module defines the pydantic models for manifold-valued data.

It includes the manifold descriptor, validated points and series, orthonormal
tangent bases and self-adjoint operators on a tangent space. Arrays are held
as numpy arrays; validators enforce the membership invariants once, at
construction time, so the numeric kernels in `manifolds` can work on raw
arrays.

Inside the numeric kernels tangent vectors are plain arrays: either in
ambient form (sphere: a vector orthogonal to the base point; SPD: a
symmetric matrix; Euclidean: a vector) or as real or complex coordinates in
an `OrthonormalBasis`. At the public entry points (`exp_map`,
`parallel_transport`, `metric_inner`, `lower`) a `TangentVector` may be
passed instead; it carries its base point, and a mismatch with the point the
operation is evaluated at raises `InvalidInputError`.

Typical usage example:

  descriptor = ManifoldDescriptor.sphere(6)
  series = ManifoldSeries(descriptor=descriptor, points=rows)
  basis = series.manifold.standard_basis(rows[0])
"""

from enum import Enum
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from manistat.exceptions import InvalidInputError

if TYPE_CHECKING:
    from manistat.geometry.manifolds import Manifold

UNIT_NORM_TOL = 1e-9
SYMMETRY_TOL = 1e-9


class ManifoldKind(str, Enum):
    sphere = "sphere"
    spd = "spd"
    euclidean = "euclidean"


class ManifoldDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ManifoldKind
    intrinsic_dim: int
    ambient_dim: int

    @model_validator(mode="after")
    def _check_dims(self) -> "ManifoldDescriptor":
        d, a = self.intrinsic_dim, self.ambient_dim
        if d < 1 or a < 1:
            raise InvalidInputError("manifold dimensions must be positive")
        if self.kind is ManifoldKind.sphere and a != d + 1:
            raise InvalidInputError(
                f"sphere S^{d} needs ambient dimension {d + 1}, got {a}"
            )
        if self.kind is ManifoldKind.spd and d != a * (a + 1) // 2:
            raise InvalidInputError(
                f"SPD({a}) has intrinsic dimension {a * (a + 1) // 2}, got {d}"
            )
        if self.kind is ManifoldKind.euclidean and a != d:
            raise InvalidInputError("Euclidean space needs ambient_dim == intrinsic_dim")
        return self

    @classmethod
    def sphere(cls, d: int) -> "ManifoldDescriptor":
        return cls(kind=ManifoldKind.sphere, intrinsic_dim=d, ambient_dim=d + 1)

    @classmethod
    def spd(cls, n: int) -> "ManifoldDescriptor":
        return cls(kind=ManifoldKind.spd, intrinsic_dim=n * (n + 1) // 2, ambient_dim=n)

    @classmethod
    def euclidean(cls, d: int) -> "ManifoldDescriptor":
        return cls(kind=ManifoldKind.euclidean, intrinsic_dim=d, ambient_dim=d)

    @classmethod
    def from_kind(cls, kind: ManifoldKind | str, ambient_dim: int) -> "ManifoldDescriptor":
        kind = ManifoldKind(kind)
        if kind is ManifoldKind.sphere:
            return cls.sphere(ambient_dim - 1)
        if kind is ManifoldKind.spd:
            return cls.spd(ambient_dim)
        return cls.euclidean(ambient_dim)

    @property
    def point_shape(self) -> tuple[int, ...]:
        if self.kind is ManifoldKind.spd:
            return (self.ambient_dim, self.ambient_dim)
        return (self.ambient_dim,)

    @property
    def manifold(self) -> "Manifold":
        from manistat.geometry.manifolds import get_manifold

        return get_manifold(self)

    def label(self) -> str:
        if self.kind is ManifoldKind.sphere:
            return f"S^{self.intrinsic_dim}"
        if self.kind is ManifoldKind.spd:
            return f"SPD({self.ambient_dim})"
        return f"R^{self.ambient_dim}"


def check_points(descriptor: ManifoldDescriptor, points: np.ndarray) -> np.ndarray:
    """Validates an array of points with shape (..., *descriptor.point_shape).

    Raises:
        InvalidInputError: naming the first (1-based) offending point.
    """
    points = np.asarray(points, dtype=float)
    shape = descriptor.point_shape
    if points.shape[points.ndim - len(shape):] != shape:
        raise InvalidInputError(
            f"expected points of shape {shape} for {descriptor.label()}, "
            f"got {points.shape}"
        )
    flat = points.reshape((-1,) + shape)
    if not np.all(np.isfinite(flat)):
        bad = int(np.argmax(~np.isfinite(flat).reshape(len(flat), -1).all(axis=1)))
        raise InvalidInputError(f"point {bad + 1} has non-finite entries", index=bad + 1)
    if descriptor.kind is ManifoldKind.sphere:
        err = np.abs(np.linalg.norm(flat, axis=-1) - 1.0)
        if np.any(err > UNIT_NORM_TOL):
            bad = int(np.argmax(err > UNIT_NORM_TOL))
            raise InvalidInputError(
                f"point {bad + 1} is not on the unit sphere "
                f"(|norm - 1| = {err[bad]:.3g})",
                index=bad + 1,
            )
    elif descriptor.kind is ManifoldKind.spd:
        asym = np.abs(flat - np.swapaxes(flat, -1, -2)).max(axis=(-1, -2))
        if np.any(asym > SYMMETRY_TOL):
            bad = int(np.argmax(asym > SYMMETRY_TOL))
            raise InvalidInputError(f"point {bad + 1} is not symmetric", index=bad + 1)
        min_eig = np.linalg.eigvalsh(flat)[:, 0]
        if np.any(min_eig <= 0):
            bad = int(np.argmax(min_eig <= 0))
            raise InvalidInputError(
                f"point {bad + 1} is not positive definite "
                f"(min eigenvalue {min_eig[bad]:.3g})",
                index=bad + 1,
            )
    return points


class ManifoldPoint(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    descriptor: ManifoldDescriptor
    coords: np.ndarray

    @model_validator(mode="after")
    def _check_membership(self) -> "ManifoldPoint":
        check_points(self.descriptor, self.coords)
        return self


class ManifoldSeries(BaseModel):
    """An ordered sequence of points X_1..X_T on one manifold."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    descriptor: ManifoldDescriptor
    points: np.ndarray

    @model_validator(mode="after")
    def _check_points(self) -> "ManifoldSeries":
        points = check_points(self.descriptor, self.points)
        if points.ndim != len(self.descriptor.point_shape) + 1 or len(points) == 0:
            raise InvalidInputError("a series needs at least one point")
        points = np.array(points, dtype=float)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        return self

    @property
    def manifold(self) -> "Manifold":
        return self.descriptor.manifold

    def __len__(self) -> int:
        return len(self.points)

    def point(self, i: int) -> ManifoldPoint:
        """Returns X_i for a 1-based time index i."""
        return ManifoldPoint(descriptor=self.descriptor, coords=self.points[i - 1])


class TangentVector(BaseModel):
    """A tangent vector in ambient form together with its base point."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    descriptor: ManifoldDescriptor
    base: np.ndarray
    vector: np.ndarray

    @model_validator(mode="after")
    def _check_tangent(self) -> "TangentVector":
        shape = self.descriptor.point_shape
        base = check_points(self.descriptor, self.base)
        vector = np.asarray(self.vector, dtype=float)
        if base.shape != shape or vector.shape != shape:
            raise InvalidInputError(
                f"tangent vector and base must both have shape {shape}"
            )
        if not np.all(np.isfinite(vector)):
            raise InvalidInputError("tangent vector has non-finite entries")
        if self.descriptor.kind is ManifoldKind.sphere:
            radial = abs(float(vector @ base))
            if radial > SYMMETRY_TOL * (1.0 + np.linalg.norm(vector)):
                raise InvalidInputError(
                    f"vector is not tangent to the sphere at its base "
                    f"(radial part {radial:.3g})"
                )
        elif self.descriptor.kind is ManifoldKind.spd:
            if np.abs(vector - vector.T).max() > SYMMETRY_TOL:
                raise InvalidInputError("SPD tangent vector is not symmetric")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "vector", vector)
        return self


class OrthonormalBasis(BaseModel):
    """An orthonormal basis E_1..E_d of the tangent space at `base`.

    `vectors` holds the basis in ambient form with shape (d, *point_shape);
    `duals` holds the metric-lowered vectors so that the coordinates of a
    tangent vector v are `tensordot(v, duals)`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    descriptor: ManifoldDescriptor
    base: np.ndarray
    vectors: np.ndarray
    duals: np.ndarray

    @model_validator(mode="after")
    def _check_shapes(self) -> "OrthonormalBasis":
        expected = (self.descriptor.intrinsic_dim,) + self.descriptor.point_shape
        if self.vectors.shape != expected or self.duals.shape != expected:
            raise InvalidInputError(
                f"basis vectors must have shape {expected}, got {self.vectors.shape}"
            )
        return self

    @property
    def dim(self) -> int:
        return self.descriptor.intrinsic_dim

    def coords(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of tangent vector(s) v with shape (..., *point_shape)."""
        axes = len(self.descriptor.point_shape)
        v = np.asarray(v)
        return np.tensordot(v, self.duals, axes=(
            tuple(range(v.ndim - axes, v.ndim)), tuple(range(1, axes + 1))
        ))

    def to_ambient(self, c: np.ndarray) -> np.ndarray:
        """Tangent vector(s) in ambient form from coordinates with shape (..., d)."""
        return np.tensordot(np.asarray(c), self.vectors, axes=([-1], [0]))

    def gram(self) -> np.ndarray:
        return self.coords(self.vectors)


class SelfAdjointOperator(BaseModel):
    """A self-adjoint operator on T_base M as a matrix in an orthonormal basis."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base: np.ndarray
    matrix: np.ndarray

    @field_validator("matrix")
    @classmethod
    def _check_symmetric(cls, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError("operator matrix must be square")
        if np.abs(matrix - matrix.T).max(initial=0.0) > 1e-8:
            raise InvalidInputError("operator matrix is not symmetric")
        return matrix

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def apply(self, c: np.ndarray) -> np.ndarray:
        return np.asarray(c) @ self.matrix.T
