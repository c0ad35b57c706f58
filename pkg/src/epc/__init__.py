"""Exact calculus for extended Poisson structures on flat complex models."""

__version__ = "0.1.0"
