"""Nystrom discretization of the linearized integral operators."""

from src.operator_lab.nystrom import (
    NystromOperator,
    condition_number,
    discretize,
    hilbert_schmidt_norm,
    operator_norm,
    quadratic_form,
    reduced_quadratic_form,
    smallest_eigenvalue,
    solve_id_minus_L,
    spectrum,
)

__all__ = [
    "NystromOperator",
    "condition_number",
    "discretize",
    "hilbert_schmidt_norm",
    "operator_norm",
    "quadratic_form",
    "reduced_quadratic_form",
    "smallest_eigenvalue",
    "solve_id_minus_L",
    "spectrum",
]
