"""
Transversality

Assembles I_m = I_m1 + I_m2 + I_m3 from the kernel system states, reports the
pointwise integrands H_m1..H_m3, and evaluates the constant kappa that drives
the abundance asymptotics.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from src.errors import WrongRegime
from src.modes import G_n_scaled, omega_hat
from src.numerics import adaptive_quad, chebyshev_grid
from src.profile import Profile
from src.kernel.kernel import F, J1_A, J1_B, J2, J3, KernelSystem, Q, require_root, solve_kernel_system

logger = logging.getLogger(__name__)

DEFAULT_RTOL = 1e-12
VERDICT_FACTOR = 10.0
# Relative band around asymptotic_limit for the abundance ratio at finite m
ASYMPTOTIC_BAND = 0.25


@dataclass(frozen=True)
class TransversalityReport:
    m: int
    omega_m: float
    I_m: float
    parts: Tuple[float, float, float]
    kappa: Optional[float]
    kappa_laplace: Optional[float]
    verdict: bool
    error_bar: float
    dominance: float
    asymptotic_ratio: Optional[float]
    asymptotic_limit: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "omega_m": self.omega_m,
            "I_m": self.I_m,
            "parts": list(self.parts),
            "kappa": self.kappa,
            "kappa_laplace": self.kappa_laplace,
            "verdict": self.verdict,
            "error_bar": self.error_bar,
            "dominance": self.dominance,
            "asymptotic_ratio": self.asymptotic_ratio,
            "asymptotic_limit": self.asymptotic_limit,
            "asymptotic_band": ASYMPTOTIC_BAND,
        }


def kappa_constant(p: Profile) -> Tuple[float, float]:
    """
    Evaluate kappa = 1 - (f0(1)/2) int_0^inf e^(-t) / (f0(1) - a t) dt, a = int_0^1 s^2 f0'(s) ds,
    both directly and through its Laplace form 1/2 + 1/2 int_0^inf e^(-mu t) / (1 + t)^2 dt.

    The Laplace integral is mapped to (0, 1) with t = u / (1 - u).

    Args:
        p: Profile with f0 < 0

    Returns:
        (direct, laplace)

    Raises:
        WrongRegime: If f0 is not negative or mu = -f0(1)/a <= 0
    """
    if p.sign != "negative":
        raise WrongRegime("kappa is defined for negative profiles only", {"sign": p.sign})
    f0_1 = float(p.f0(1.0))
    slope = p.slope_moment()
    if slope <= 0 or -f0_1 / slope <= 0:
        raise WrongRegime(f"mu = -f0(1)/a must be positive (f0(1)={f0_1}, a={slope})")
    mu = -f0_1 / slope

    direct = 1.0 - 0.5 * f0_1 * adaptive_quad(lambda t: np.exp(-t) / (f0_1 - slope * t), 0.0, np.inf)

    def laplace_integrand(u: float) -> float:
        if u >= 1.0:
            return 0.0
        return float(np.exp(-mu * u / (1.0 - u)))

    laplace = 0.5 + 0.5 * adaptive_quad(laplace_integrand, 0.0, 1.0)
    logger.debug(f"kappa: mu={mu:.6g}, direct={direct:.15g}, laplace={laplace:.15g}")
    return float(direct), float(laplace)


def asymptotic_limit(p: Profile) -> float:
    """
    Large-m limit of I_m3 m (Omega_m - Omega_hat_m) / kappa.

    The weighted boundary layer at r = 1 gives
    I_m3 m (Omega_m - Omega_hat_m) -> (f0'(1)/2)(2 kappa - 1), so the ratio
    tends to f0'(1)(2 kappa - 1)/(2 kappa), not to 1.

    Raises:
        WrongRegime: If f0 is not negative
    """
    _, kappa = kappa_constant(p)
    return float(p.f0_prime(1.0)) * (2.0 * kappa - 1.0) / (2.0 * kappa)


def _parts(system: KernelSystem) -> Tuple[float, float, float]:
    final = system.final
    return (
        float(final[J1_A] - system.q_at_1 * final[J1_B]),
        float(final[J2]),
        float(final[J3] / system.boundary_gap),
    )


def transversality(
    p: Profile, m: int, omega_m: float, tol: float = 1e-10, rtol: float = DEFAULT_RTOL
) -> TransversalityReport:
    """
    Compute I_m and its decomposition at a certified root.

    The error bar is the change in I_m when the integrator tolerance is
    loosened tenfold.

    Args:
        p: Validated profile
        m: Symmetry
        omega_m: Root of zeta_m
        tol: Root tolerance
        rtol: Integrator tolerance

    Returns:
        TransversalityReport

    Raises:
        NotARoot: If |zeta_m(omega_m)| > tol
    """
    require_root(p, m, omega_m, tol)
    parts = _parts(solve_kernel_system(p, m, omega_m, rtol=rtol))
    coarse = _parts(solve_kernel_system(p, m, omega_m, rtol=10 * rtol))
    total = float(sum(parts))
    error_bar = abs(total - float(sum(coarse))) + 1e-14 * max(1.0, sum(abs(x) for x in parts))
    verdict = abs(total) > VERDICT_FACTOR * error_bar

    denominator = abs(parts[0]) + abs(parts[1])
    dominance = abs(parts[2]) / denominator if denominator > 0 else float("inf")

    kappa = kappa_laplace = asymptotic_ratio = limit = None
    if p.sign == "negative":
        kappa, kappa_laplace = kappa_constant(p)
        asymptotic_ratio = parts[2] * m * (omega_m - omega_hat(p, m)) / kappa
        limit = asymptotic_limit(p)

    logger.info(
        f"Transversality m={m}: I_m={total:.6e} (parts {parts[0]:.3e}, {parts[1]:.3e}, {parts[2]:.3e}), "
        f"error bar {error_bar:.1e}, verdict={verdict}"
    )
    return TransversalityReport(
        m=m,
        omega_m=omega_m,
        I_m=total,
        parts=parts,
        kappa=kappa,
        kappa_laplace=kappa_laplace,
        verdict=verdict,
        error_bar=error_bar,
        dominance=dominance,
        asymptotic_ratio=asymptotic_ratio,
        asymptotic_limit=limit,
    )


def transversality_profile(
    p: Profile, m: int, omega_m: float, grid_size: int = 129, tol: float = 1e-10
) -> pd.DataFrame:
    """
    Pointwise integrands of the three parts of I_m.

    Column H_i holds nu r^(2m+1) F_m times the i-th kernel factor, so it is the
    full integrand: its integral over (0, 1) is ``parts[i - 1]`` of the report.

    Returns:
        DataFrame with columns r, H_1, H_2, H_3, total on interior Chebyshev nodes
    """
    require_root(p, m, omega_m, tol)
    system = solve_kernel_system(p, m, omega_m)
    r = chebyshev_grid(grid_size)[1:-1]
    s = system.states(r)
    nu = np.asarray(p.nu(omega_m, r))
    gap = omega_m - np.asarray(p.inner_mean(r))
    base = nu * r ** (2 * m + 1) * s[F]
    h1 = 4.0 * (m + 1) * base * s[F] * (s[Q] - system.q_at_1) / gap
    h2 = -base * r * r
    h3 = base * np.asarray(G_n_scaled(p, omega_m, m, r)) / system.boundary_gap
    return pd.DataFrame({"r": r, "H_1": h1, "H_2": h2, "H_3": h3, "total": h1 + h2 + h3})
