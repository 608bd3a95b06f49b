"""Numerics for the first moment of quadratic Dirichlet L-functions at shifted central points."""

__version__ = "0.1.0"
