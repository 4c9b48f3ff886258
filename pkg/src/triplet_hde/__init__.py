"""Commutative triplet structures over finite groups and their spectral certificates."""

__version__ = "0.1.0"
