"""Shared fixtures: the reference profiles and their expensive roots."""

import sys
from pathlib import Path

import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.dispersion import find_abundance_root, scan_abundance, scan_scarcity
from src.profile import Profile


@pytest.fixture(scope="session")
def quadratic():
    """f0 = 1 + r^2."""
    return Profile.polynomial([1.0, 1.0])


@pytest.fixture(scope="session")
def scarcity():
    """f0 = 1 + 0.01 r^2."""
    return Profile.polynomial([1.0, 0.01])


@pytest.fixture(scope="session")
def abundance():
    """f0 = -2 + r^2."""
    return Profile.polynomial([-2.0, 1.0])


@pytest.fixture(scope="session")
def scarcity_root(scarcity):
    """Omega_3 of f0 = 1 + 0.01 r^2."""
    scan = scan_scarcity(scarcity, 3, tol=1e-10)
    assert len(scan.roots) == 1
    return scan.roots[0].omega


@pytest.fixture(scope="session")
def abundance_root(abundance):
    """(m, Omega_m) of f0 = -2 + r^2, searching upward from m = 40."""
    m, root = find_abundance_root(abundance, 40, max_m=80)
    return m, root.omega


@pytest.fixture(scope="session")
def abundance_roots(abundance):
    """Omega_m of f0 = -2 + r^2 for m = 40 and m = 60."""
    roots = {}
    for m in (40, 60):
        scan = scan_abundance(abundance, m, tol=1e-10)
        assert scan.roots, f"no root of zeta_{m}"
        roots[m] = scan.roots[0].omega
    return roots
