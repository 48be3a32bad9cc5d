"""Planar curves from prime-frequency exponential sums and their randomized controls."""

__version__ = "0.1.0"
