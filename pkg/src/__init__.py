"""Vortex Spectra - Bifurcation analysis of radial vortices in the 2D Euler equations."""

__version__ = "0.1.0"
