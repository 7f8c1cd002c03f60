"""Exact-arithmetic verification of modular q-series anomaly cancellation formulas."""

__version__ = "0.1.0"
