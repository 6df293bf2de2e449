"""Posets, their directed decompositions, and the Toeplitz-algebra embedding checks."""

__version__ = "0.1.0"
