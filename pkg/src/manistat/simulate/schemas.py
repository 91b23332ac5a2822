from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from manistat.exceptions import InvalidInputError


class FourierCurve(BaseModel):
    """b(t) = c_0 + sum_k [a_k cos(2 pi k t) + b_k sin(2 pi k t)].

    Coefficients are coordinate vectors in the standard basis at the base
    point of the simulated model.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    intercept: np.ndarray
    cos: Optional[np.ndarray] = None
    sin: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def _check_shapes(self) -> "FourierCurve":
        d = np.shape(self.intercept)
        if len(d) != 1:
            raise InvalidInputError("intercept must be a coordinate vector")
        for name in ("cos", "sin"):
            coef = getattr(self, name)
            if coef is not None and (np.ndim(coef) != 2 or np.shape(coef)[1] != d[0]):
                raise InvalidInputError(f"{name} coefficients must have shape (K, {d[0]})")
        return self

    @classmethod
    def zero(cls, d: int) -> "FourierCurve":
        return cls(intercept=np.zeros(d))

    @property
    def dim(self) -> int:
        return len(self.intercept)

    def __call__(self, t) -> np.ndarray:
        """Evaluates b at times t, returning shape (*t.shape, d)."""
        t = np.asarray(t, dtype=float)[..., None]
        value = np.broadcast_to(np.asarray(self.intercept, dtype=float), t.shape[:-1] + (self.dim,))
        value = np.array(value)
        for name, wave in (("cos", np.cos), ("sin", np.sin)):
            coef = getattr(self, name)
            if coef is None:
                continue
            for k, row in enumerate(np.asarray(coef, dtype=float), start=1):
                value = value + wave(2.0 * np.pi * k * t) * row
        return value
