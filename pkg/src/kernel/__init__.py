"""Kernel generator, range characterization and transversality."""

from src.kernel.kernel import (
    KernelGenerator,
    KernelSystem,
    d_star,
    kernel_generator,
    range_density,
    range_membership,
    require_root,
    solve_kernel_system,
    verify_kernel_ode,
)
from src.kernel.transversality import (
    TransversalityReport,
    asymptotic_limit,
    kappa_constant,
    transversality,
    transversality_profile,
)

__all__ = [
    "KernelGenerator",
    "KernelSystem",
    "TransversalityReport",
    "asymptotic_limit",
    "d_star",
    "kappa_constant",
    "kernel_generator",
    "range_density",
    "range_membership",
    "require_root",
    "solve_kernel_system",
    "transversality",
    "transversality_profile",
    "verify_kernel_ode",
]
