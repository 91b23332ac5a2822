from manistat.frechet.config import FrechetConfig, FrechetInit
from manistat.frechet.frechet import (
    check_hemisphere,
    extrinsic_mean,
    frechet_mean,
    karcher_mean,
)
from manistat.frechet.schemas import FrechetDiagnostics

__all__ = [
    "FrechetConfig",
    "FrechetDiagnostics",
    "FrechetInit",
    "check_hemisphere",
    "extrinsic_mean",
    "frechet_mean",
    "karcher_mean",
]
