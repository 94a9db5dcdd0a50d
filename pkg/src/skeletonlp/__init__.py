"""Exact skeleton-LP solvers built on difference constraints."""

__version__ = "0.1.0"
