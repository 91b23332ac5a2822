"""Riemannian kernels for the hypersphere, SPD matrices and Euclidean space.

Every manifold exposes the same numeric interface on raw numpy arrays. A
point array has shape (..., *point_shape) and a tangent vector in ambient
form has the same trailing shape; leading axes broadcast numpy-style, so one
call can map a whole series. `ManifoldPoint` instances are accepted wherever
a point is expected.

The module includes the following classes:
- `Manifold`: The shared interface plus the generic finite-difference
  Hessian, geodesics and parallel frames.
- `Sphere`: The unit sphere S^d in R^{d+1} with the round metric.
- `SPD`: Symmetric positive definite n x n matrices with the
  affine-invariant metric.
- `Euclidean`: Flat R^d.

Typical usage example:

    manifold = get_manifold(ManifoldDescriptor.sphere(6))
    v = manifold.log_map(mean, points)
    basis = manifold.standard_basis(mean)
    coords = basis.coords(v)
"""

from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Optional

import numpy as np

from manistat.exceptions import DomainError, InvalidInputError
from manistat.geometry.linalg import (
    expm_sym,
    inv_spd,
    logm_spd,
    sqrt_and_inv_sqrt,
    sqrtm_spd,
    symmetrize,
)
from manistat.geometry.schemas import (
    ManifoldDescriptor,
    ManifoldKind,
    ManifoldPoint,
    ManifoldSeries,
    OrthonormalBasis,
    SelfAdjointOperator,
    TangentVector,
)
from manistat.utils import get_logger

logger = get_logger(__name__)

CUT_LOCUS_TOL = 1e-12
FD_REL_STEP = 1e-4


def _first_index(mask: np.ndarray) -> Optional[int]:
    """1-based position of the first True entry of a flattened mask."""
    flat = np.flatnonzero(np.ravel(mask))
    if mask.ndim == 0 or len(flat) == 0:
        return None
    return int(flat[0]) + 1


class Manifold(ABC):
    """Common interface of the supported Riemannian manifolds."""

    def __init__(self, descriptor: ManifoldDescriptor):
        self.descriptor = descriptor

    @property
    def dim(self) -> int:
        return self.descriptor.intrinsic_dim

    @property
    def point_shape(self) -> tuple[int, ...]:
        return self.descriptor.point_shape

    @property
    def point_ndim(self) -> int:
        return len(self.point_shape)

    @property
    def is_flat(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.descriptor.label()})"

    def as_array(self, x, name: str = "point") -> np.ndarray:
        if isinstance(x, (ManifoldPoint, ManifoldSeries)):
            if x.descriptor != self.descriptor:
                raise InvalidInputError(
                    f"{name} lives on {x.descriptor.label()}, "
                    f"expected {self.descriptor.label()}"
                )
            return x.coords if isinstance(x, ManifoldPoint) else x.points
        x = np.asarray(x)
        shape = self.point_shape
        if x.shape[x.ndim - len(shape):] != shape:
            raise InvalidInputError(
                f"{name} of shape {x.shape} does not match "
                f"{self.descriptor.label()}"
            )
        return x

    def as_tangent(self, v, p, name: str = "tangent vector") -> np.ndarray:
        """Ambient array of v; a TangentVector must be based at p."""
        if not isinstance(v, TangentVector):
            return np.asarray(v)
        if v.descriptor != self.descriptor:
            raise InvalidInputError(
                f"{name} lives on {v.descriptor.label()}, "
                f"expected {self.descriptor.label()}"
            )
        p = self.as_array(p)
        if not np.allclose(v.base, p, rtol=0.0, atol=1e-10):
            raise InvalidInputError(
                f"{name} is based at a different point than the one it is "
                f"used at"
            )
        return v.vector

    def _expand_scalar(self, s: np.ndarray) -> np.ndarray:
        return np.asarray(s).reshape(np.shape(s) + (1,) * self.point_ndim)

    @abstractmethod
    def distance(self, p, q) -> np.ndarray:
        """Geodesic distance between p and q."""

    @abstractmethod
    def exp_map(self, p, v: np.ndarray) -> np.ndarray:
        """Riemannian exponential of the tangent vector v at p."""

    @abstractmethod
    def log_map(self, p, q) -> np.ndarray:
        """Tangent vector at p pointing to q along the minimizing geodesic."""

    @abstractmethod
    def parallel_transport(self, v: np.ndarray, start, end) -> np.ndarray:
        """Transports v from `start` to `end` along the minimizing geodesic."""

    @abstractmethod
    def metric_inner(self, p, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Inner product at p, conjugate-linear in the second argument."""

    @abstractmethod
    def lower(self, p, v: np.ndarray) -> np.ndarray:
        """Metric dual of v at p, so that <v, w>_p = sum(w * lower(p, v))."""

    @abstractmethod
    def standard_basis(self, p) -> OrthonormalBasis:
        """Canonical orthonormal basis of the tangent space at p."""

    @abstractmethod
    def random_point(
        self, rng: np.random.Generator, size: tuple[int, ...] = ()
    ) -> np.ndarray:
        pass

    @abstractmethod
    def random_tangent(self, rng: np.random.Generator, p) -> np.ndarray:
        pass

    def hessian_matrices(
        self, p, xs, basis: OrthonormalBasis
    ) -> np.ndarray:
        """Matrices of H(p, x) in `basis` for every x in xs, shape (..., d, d).

        H(p, x) is the Riemannian Hessian at p of f_x = d^2(., x) / 2.
        """
        return self.finite_difference_hessian(p, xs, basis)

    def norm(self, p, v: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(np.real(self.metric_inner(p, v, v)), 0.0))

    def make_basis(self, p, vectors: np.ndarray) -> OrthonormalBasis:
        p = self.as_array(p)
        return OrthonormalBasis(
            descriptor=self.descriptor,
            base=p,
            vectors=vectors,
            duals=self.lower(p, vectors),
        )

    def geodesic(self, p, q, s) -> np.ndarray:
        """Points exp_p(s log_p q); s may be an array of curve parameters."""
        p = self.as_array(p)
        v = self.log_map(p, q)
        return self.exp_map(p, self._expand_scalar(s) * v)

    def hessian(self, p, x, basis: OrthonormalBasis) -> SelfAdjointOperator:
        p = self.as_array(p)
        self._check_basis(p, basis)
        matrix = self.hessian_matrices(p, self.as_array(x), basis)
        return SelfAdjointOperator(base=p, matrix=matrix)

    def finite_difference_hessian(
        self,
        p,
        xs,
        basis: OrthonormalBasis,
        rel_step: float = FD_REL_STEP,
    ) -> np.ndarray:
        """Central finite differences of the gradient field -Log_z x.

        The gradient at z = exp_p(+-h E_j) is transported back to p before
        differencing. The step is h = rel_step * max(1, d(p, x)).
        """
        p = self.as_array(p)
        xs = self.as_array(xs)
        nd = self.point_ndim
        h = rel_step * np.maximum(1.0, self.distance(p, xs))
        h_b = np.reshape(h, np.shape(h) + (1,) * (nd + 1))
        steps = h_b * basis.vectors
        x_b = np.expand_dims(xs, axis=-nd - 1)
        columns = []
        for sign in (1.0, -1.0):
            z = self.exp_map(p, sign * steps)
            grad = -self.log_map(z, x_b)
            columns.append(self.parallel_transport(grad, z, p))
        diff = (columns[0] - columns[1]) / (2.0 * h_b)
        matrices = np.swapaxes(basis.coords(diff), -1, -2)
        return symmetrize(matrices)

    def parallel_frame(
        self, curve, initial: OrthonormalBasis
    ) -> list[OrthonormalBasis]:
        """Transports `initial` step by step along consecutive curve points."""
        curve = self.as_array(curve, "curve")
        self._check_basis(curve[0], initial)
        frames = [initial]
        vectors = initial.vectors
        for k in range(1, len(curve)):
            vectors = self.parallel_transport(vectors, curve[k - 1], curve[k])
            frames.append(self.make_basis(curve[k], vectors))
        return frames

    def _check_basis(self, p: np.ndarray, basis: OrthonormalBasis) -> None:
        if basis.descriptor != self.descriptor or not np.allclose(
            basis.base, p, rtol=0.0, atol=1e-9
        ):
            raise InvalidInputError("basis is not based at the given point")


class Sphere(Manifold):
    """The unit sphere with the round metric."""

    def metric_inner(self, p, u, v):
        u, v = self.as_tangent(u, p, "u"), self.as_tangent(v, p, "v")
        return np.sum(u * np.conj(v), axis=-1)

    def lower(self, p, v):
        return self.as_tangent(v, p)

    def distance(self, p, q):
        p, q = self.as_array(p), self.as_array(q, "q")
        c = np.sum(p * q, axis=-1)
        s = np.linalg.norm(q - c[..., None] * p, axis=-1)
        return np.arctan2(s, c)

    def exp_map(self, p, v):
        v = np.asarray(self.as_tangent(v, p), dtype=float)
        p = self.as_array(p)
        nv = np.linalg.norm(v, axis=-1)
        if np.any(nv >= np.pi):
            index = _first_index(nv >= np.pi)
            raise DomainError(
                f"tangent vector of norm {np.max(nv):.4g} exceeds the "
                f"injectivity radius pi",
                code="injectivity",
                index=index,
            )
        out = np.cos(nv)[..., None] * p + np.sinc(nv / np.pi)[..., None] * v
        return out / np.linalg.norm(out, axis=-1, keepdims=True)

    def log_map(self, p, q):
        p, q = self.as_array(p), self.as_array(q, "q")
        c = np.sum(p * q, axis=-1)
        cut = c <= -1.0 + CUT_LOCUS_TOL
        if np.any(cut):
            index = _first_index(cut)
            where = f" (observation {index})" if index is not None else ""
            raise DomainError(
                f"antipodal points{where} lie on the cut locus",
                code="cut_locus",
                index=index,
            )
        w = q - c[..., None] * p
        s = np.linalg.norm(w, axis=-1)
        theta = np.arctan2(s, c)
        scale = np.divide(theta, s, out=np.zeros_like(theta), where=s > 0)
        return scale[..., None] * w

    def parallel_transport(self, v, start, end):
        v = self.as_tangent(v, start)
        start, end = self.as_array(start), self.as_array(end, "end")
        u = self.log_map(start, end)
        theta = np.linalg.norm(u, axis=-1, keepdims=True)
        e = np.divide(u, theta, out=np.zeros_like(u), where=theta > 0)
        a = np.sum(v * e, axis=-1, keepdims=True)
        return v + (np.cos(theta) - 1.0) * a * e - np.sin(theta) * a * start

    def hessian_matrices(self, p, xs, basis):
        """Closed form theta*cot(theta) on the complement of Log_p x, 1 along it."""
        p = self.as_array(p)
        u = self.log_map(p, self.as_array(xs))
        theta = np.linalg.norm(u, axis=-1)
        c = basis.coords(u)
        direction = np.divide(
            c, theta[..., None], out=np.zeros_like(c), where=theta[..., None] > 0
        )
        small = theta < 1e-6
        safe = np.where(small, 1.0, theta)
        f = np.where(small, 1.0 - theta**2 / 3.0, safe / np.tan(safe))
        eye = np.eye(self.dim)
        outer = direction[..., :, None] * direction[..., None, :]
        return f[..., None, None] * eye + (1.0 - f)[..., None, None] * outer

    def standard_basis(self, p):
        """Projected standard axes, minus the one closest to p, orthonormalised."""
        p = self.as_array(p)
        n = self.descriptor.ambient_dim
        projected = np.eye(n) - np.outer(p, p)
        keep = np.delete(np.arange(n), int(np.argmax(np.abs(p))))
        q, r = np.linalg.qr(projected[keep].T)
        q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
        vectors = q.T - np.outer(q.T @ p, p)
        return self.make_basis(p, vectors)

    def random_point(self, rng, size=()):
        z = rng.standard_normal(tuple(size) + (self.descriptor.ambient_dim,))
        return z / np.linalg.norm(z, axis=-1, keepdims=True)

    def random_tangent(self, rng, p):
        p = self.as_array(p)
        z = rng.standard_normal(p.shape)
        return z - np.sum(z * p, axis=-1, keepdims=True) * p


class SPD(Manifold):
    """Symmetric positive definite matrices with the affine-invariant metric."""

    def metric_inner(self, p, u, v):
        u, v = self.as_tangent(u, p, "u"), self.as_tangent(v, p, "v")
        p_inv = inv_spd(self.as_array(p))
        a = p_inv @ u
        b = p_inv @ np.conj(v)
        return np.sum(a * np.swapaxes(b, -1, -2), axis=(-2, -1))

    def lower(self, p, v):
        v = self.as_tangent(v, p)
        p_inv = inv_spd(self.as_array(p))
        return p_inv @ v @ p_inv

    def distance(self, p, q):
        p, q = self.as_array(p), self.as_array(q, "q")
        _, inv_root = sqrt_and_inv_sqrt(p)
        w = logm_spd(inv_root @ q @ inv_root)
        return np.linalg.norm(w, axis=(-2, -1))

    def exp_map(self, p, v):
        v = self.as_tangent(v, p)
        root, inv_root = sqrt_and_inv_sqrt(self.as_array(p))
        return symmetrize(root @ expm_sym(inv_root @ v @ inv_root) @ root)

    def log_map(self, p, q):
        p, q = self.as_array(p), self.as_array(q, "q")
        root, inv_root = sqrt_and_inv_sqrt(p)
        return symmetrize(root @ logm_spd(inv_root @ q @ inv_root) @ root)

    def parallel_transport(self, v, start, end):
        v = self.as_tangent(v, start)
        start, end = self.as_array(start), self.as_array(end, "end")
        root, inv_root = sqrt_and_inv_sqrt(start)
        e = root @ sqrtm_spd(inv_root @ end @ inv_root) @ inv_root
        out = symmetrize(e @ v @ np.swapaxes(e, -1, -2))
        same = np.all(start == end, axis=(-2, -1))
        return np.where(same[..., None, None], v, out)

    def standard_basis(self, p):
        """Congruence p^{1/2} U p^{1/2} of the normalised symmetric unit matrices.

        Ordered like the row-major upper triangle: (1,1), (1,2), ..., (n,n).
        """
        p = self.as_array(p)
        units = symmetric_unit_matrices(self.descriptor.ambient_dim, normalised=True)
        root, inv_root = sqrt_and_inv_sqrt(p)
        vectors = symmetrize(root @ units @ root)
        return OrthonormalBasis(
            descriptor=self.descriptor,
            base=p,
            vectors=vectors,
            duals=symmetrize(inv_root @ units @ inv_root),
        )

    def random_point(self, rng, size=()):
        n = self.descriptor.ambient_dim
        a = rng.standard_normal(tuple(size) + (n, n))
        return expm_sym(0.5 * symmetrize(a))

    def random_tangent(self, rng, p):
        p = self.as_array(p)
        root = sqrtm_spd(p)
        return symmetrize(root @ symmetrize(rng.standard_normal(p.shape)) @ root)


class Euclidean(Manifold):
    @property
    def is_flat(self) -> bool:
        return True

    def metric_inner(self, p, u, v):
        u, v = self.as_tangent(u, p, "u"), self.as_tangent(v, p, "v")
        return np.sum(u * np.conj(v), axis=-1)

    def lower(self, p, v):
        return self.as_tangent(v, p)

    def distance(self, p, q):
        p, q = self.as_array(p), self.as_array(q, "q")
        return np.linalg.norm(q - p, axis=-1)

    def exp_map(self, p, v):
        return self.as_array(p) + self.as_tangent(v, p)

    def log_map(self, p, q):
        return self.as_array(q, "q") - self.as_array(p)

    def parallel_transport(self, v, start, end):
        v = self.as_tangent(v, start)
        shape = np.broadcast_shapes(
            np.shape(v), np.shape(self.as_array(start)), np.shape(end)
        )
        return np.array(np.broadcast_to(v, shape))

    def hessian_matrices(self, p, xs, basis):
        xs = self.as_array(xs)
        shape = xs.shape[:-1] + (self.dim, self.dim)
        return np.array(np.broadcast_to(np.eye(self.dim), shape))

    def standard_basis(self, p):
        eye = np.eye(self.dim)
        return OrthonormalBasis(
            descriptor=self.descriptor, base=self.as_array(p), vectors=eye, duals=eye
        )

    def random_point(self, rng, size=()):
        return rng.standard_normal(tuple(size) + (self.dim,))

    def random_tangent(self, rng, p):
        return rng.standard_normal(self.as_array(p).shape)


def symmetric_unit_matrices(n: int, normalised: bool = True) -> np.ndarray:
    """Symmetric matrices E_jk (j <= k) in row-major upper-triangle order.

    Off-diagonal units have ones at (j, k) and (k, j); with `normalised`
    they are divided by sqrt(2) so that all have unit norm at the identity.
    """
    rows, cols = np.triu_indices(n)
    units = np.zeros((len(rows), n, n))
    idx = np.arange(len(rows))
    units[idx, rows, cols] = 1.0
    units[idx, cols, rows] = 1.0
    if normalised:
        units[rows != cols] /= np.sqrt(2.0)
    return units


@lru_cache(maxsize=None)
def get_manifold(descriptor: ManifoldDescriptor) -> Manifold:
    """Returns the shared kernel object for a manifold descriptor."""
    if descriptor.kind is ManifoldKind.sphere:
        return Sphere(descriptor)
    if descriptor.kind is ManifoldKind.spd:
        return SPD(descriptor)
    return Euclidean(descriptor)
