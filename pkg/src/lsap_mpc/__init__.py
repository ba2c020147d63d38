"""Verifiable, privacy-preserving solvers for the linear sum assignment problem."""

__version__ = "0.1.0"
