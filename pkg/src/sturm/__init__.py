"""Generator equation and mode-zero phase analysis."""

from src.sturm.generator import (
    GeneratorSolution,
    contraction_constant,
    hypergeometric_generator,
    rho_bounds,
    rho_gap,
    solve_generator,
    solve_generator_volterra,
)
from src.sturm.prufer import PruferTrace, kneser_margin, mode0_exceptional_set, prufer_trace

__all__ = [
    "GeneratorSolution",
    "PruferTrace",
    "contraction_constant",
    "hypergeometric_generator",
    "kneser_margin",
    "mode0_exceptional_set",
    "prufer_trace",
    "rho_bounds",
    "rho_gap",
    "solve_generator",
    "solve_generator_volterra",
]
