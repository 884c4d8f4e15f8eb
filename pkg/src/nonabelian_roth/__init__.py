"""Exact finite-group machinery for counting solutions of xz = y^2."""

__version__ = "0.1.0"
