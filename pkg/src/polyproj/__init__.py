"""Exact constructions and combinatorics of projected deformed products."""

__version__ = "0.1.0"
