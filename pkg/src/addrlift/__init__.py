"""Composed addressing functions: Fourier analysis, LP bounds, query simulation."""
__version__ = "0.1.0"
