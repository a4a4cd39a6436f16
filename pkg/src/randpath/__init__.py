"""Exact enumeration and inequality checks for interacting loop/walk ensembles."""

__version__ = "0.1.0"
