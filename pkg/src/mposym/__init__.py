"""Algebraic structure, anomalies and fixed points of matrix product operator symmetries."""

__version__ = "0.1.0"
