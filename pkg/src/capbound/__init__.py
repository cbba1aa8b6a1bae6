"""Polynomial-method bounds for progression-free sets, with brute-force checks."""

__version__ = "0.1.0"
