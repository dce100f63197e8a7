"""Numerical laboratory for Siegel transforms over symplectic lattices."""

__version__ = "0.1.0"
