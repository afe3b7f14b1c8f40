"""Exact verification toolkit for correlation inequalities on the hypercube."""

__version__ = "1.0.0"
