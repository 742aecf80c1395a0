"""Numerical laboratory for the Mandelbrot map and its delayed relaxation extension."""

__version__ = "0.1.0"
