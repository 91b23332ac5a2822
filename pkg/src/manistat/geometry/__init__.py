from manistat.geometry.manifolds import (
    SPD,
    Euclidean,
    Manifold,
    Sphere,
    get_manifold,
    symmetric_unit_matrices,
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

__all__ = [
    "Euclidean",
    "Manifold",
    "ManifoldDescriptor",
    "ManifoldKind",
    "ManifoldPoint",
    "ManifoldSeries",
    "OrthonormalBasis",
    "SPD",
    "SelfAdjointOperator",
    "Sphere",
    "TangentVector",
    "get_manifold",
    "symmetric_unit_matrices",
]
