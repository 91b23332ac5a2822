from pydantic import BaseModel


class FrechetDiagnostics(BaseModel):
    iterations: int
    grad_norm: float
    converged: bool
    # sum of squared distances to the data, one entry per evaluated iterate
    objective: list[float]
