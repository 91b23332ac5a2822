"""Batched matrix functions for symmetric matrices.

All functions accept arrays of shape (..., n, n) and work through one
symmetric eigendecomposition per matrix. Functions that need a positive
definite argument refuse matrices whose eigenvalue ratio exceeds
`MAX_CONDITION`.

Typical usage example:

    root, inv_root = sqrt_and_inv_sqrt(p)
    w = logm_spd(inv_root @ q @ inv_root)
"""

from typing import Callable

import numpy as np

from manistat.exceptions import DegenerateDataError

MAX_CONDITION = 1e12


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def _eigh(a: np.ndarray, positive: bool) -> tuple[np.ndarray, np.ndarray]:
    eigvals, eigvecs = np.linalg.eigh(symmetrize(a))
    if positive:
        lo, hi = eigvals[..., 0], eigvals[..., -1]
        if np.any(lo <= 0) or np.any(hi > MAX_CONDITION * lo):
            bad = np.argwhere((lo <= 0) | (hi > MAX_CONDITION * lo))[0]
            raise DegenerateDataError(
                f"matrix at batch position {tuple(int(i) for i in bad)} is "
                f"not positive definite or has condition number above "
                f"{MAX_CONDITION:.0e}"
            )
    return eigvals, eigvecs


def _rebuild(eigvals: np.ndarray, eigvecs: np.ndarray) -> np.ndarray:
    out = (eigvecs * eigvals[..., None, :]) @ np.swapaxes(eigvecs, -1, -2)
    return symmetrize(out)


def apply_eigenfunction(
    a: np.ndarray, func: Callable[[np.ndarray], np.ndarray], positive: bool = True
) -> np.ndarray:
    """Applies a scalar function to the eigenvalues of symmetric matrices."""
    eigvals, eigvecs = _eigh(np.asarray(a, dtype=float), positive)
    return _rebuild(func(eigvals), eigvecs)


def sqrtm_spd(a: np.ndarray) -> np.ndarray:
    return apply_eigenfunction(a, np.sqrt)


def inv_sqrtm_spd(a: np.ndarray) -> np.ndarray:
    return apply_eigenfunction(a, lambda w: 1.0 / np.sqrt(w))


def sqrt_and_inv_sqrt(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Returns (a^{1/2}, a^{-1/2}) from a single decomposition."""
    eigvals, eigvecs = _eigh(np.asarray(a, dtype=float), positive=True)
    root = np.sqrt(eigvals)
    return _rebuild(root, eigvecs), _rebuild(1.0 / root, eigvecs)


def inv_spd(a: np.ndarray) -> np.ndarray:
    return apply_eigenfunction(a, np.reciprocal)


def logm_spd(a: np.ndarray) -> np.ndarray:
    return apply_eigenfunction(a, np.log)


def expm_sym(a: np.ndarray) -> np.ndarray:
    return apply_eigenfunction(a, np.exp, positive=False)
