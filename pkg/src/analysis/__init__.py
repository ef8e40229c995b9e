"""Composed bifurcation analyses."""

from src.analysis.pipeline import (
    ABUNDANCE,
    REGIMES,
    SCARCITY,
    BifurcationResult,
    abundance_pipeline,
    find_eigenvalues,
    run_pipeline,
    scarcity_pipeline,
)

__all__ = [
    "ABUNDANCE",
    "REGIMES",
    "SCARCITY",
    "BifurcationResult",
    "abundance_pipeline",
    "find_eigenvalues",
    "run_pipeline",
    "scarcity_pipeline",
]
