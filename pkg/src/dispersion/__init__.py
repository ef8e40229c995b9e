"""Dispersion function, root scans and eigenvalue certificates."""

from src.dispersion.dispersion import (
    DispersionRoot,
    DispersionScan,
    EigenvalueCertificate,
    T_value,
    abundance_window,
    certify,
    find_abundance_root,
    kernel_dimension,
    scan_abundance,
    scan_scarcity,
    scan_window,
    scarcity_bound,
    scarcity_window,
    zeta,
    zeta_with_generator,
)

__all__ = [
    "DispersionRoot",
    "DispersionScan",
    "EigenvalueCertificate",
    "T_value",
    "abundance_window",
    "certify",
    "find_abundance_root",
    "kernel_dimension",
    "scan_abundance",
    "scan_scarcity",
    "scan_window",
    "scarcity_bound",
    "scarcity_window",
    "zeta",
    "zeta_with_generator",
]
