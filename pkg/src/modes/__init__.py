"""Mode-indexed building blocks of the linearized operator."""

from src.modes.modes import (
    ModeCoefficients,
    A_n,
    G_n,
    G_n_scaled,
    H_n,
    linearized_operator,
    mode_coefficients,
    omega_hat,
    singular_set,
)

__all__ = [
    "ModeCoefficients",
    "A_n",
    "G_n",
    "G_n_scaled",
    "H_n",
    "linearized_operator",
    "mode_coefficients",
    "omega_hat",
    "singular_set",
]
