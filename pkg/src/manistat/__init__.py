"""Stationarity tests for time series on Riemannian manifolds."""

__version__ = "0.1.0"
