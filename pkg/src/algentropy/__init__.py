"""Algebraic entropy of birational maps of projective space."""
__version__ = "0.1.0"
