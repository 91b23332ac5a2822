from manistat.simulate.config import SimModel, SimSpec
from manistat.simulate.models import (
    simulate,
    simulate_local_alternative,
    simulate_m1,
    simulate_m2,
    simulate_m3,
)
from manistat.simulate.schemas import FourierCurve

__all__ = [
    "FourierCurve",
    "SimModel",
    "SimSpec",
    "simulate",
    "simulate_local_alternative",
    "simulate_m1",
    "simulate_m2",
    "simulate_m3",
]
