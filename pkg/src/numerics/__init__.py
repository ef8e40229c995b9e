"""Shared quadrature, grid and sweep helpers."""

from src.numerics.quadrature import (
    adaptive_quad,
    chebyshev_grid,
    gauss_legendre,
    radial_quadrature,
)
from src.numerics.parallel import parallel_map

__all__ = [
    "adaptive_quad",
    "chebyshev_grid",
    "gauss_legendre",
    "radial_quadrature",
    "parallel_map",
]
