"""
Mode-Zero Phase Analysis

Prufer rewriting of the radial generator after the change of variable
y = 1/(1 - r), which sends the boundary r = 1 to infinity:

    (P G')' + q G = 0,   P = y^2 - y,   q = (y - 1) nu(1 - 1/y) / y^3,
    G = rho sin(theta),  P G' = rho cos(theta).

The limit phase theta_bar(Omega) decides the exceptional set where the
radial part of the linearized operator has a kernel.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from src.errors import ForbiddenOmega, TailNotConverged, ToleranceNotMet
from src.numerics import chebyshev_grid, parallel_map
from src.profile import Profile

logger = logging.getLogger(__name__)

START_RADIUS = 1e-3
Y_CAP = 1e6
DEFAULT_TOL = 1e-4
MAJORANT_SAFETY = 1.05


@dataclass(frozen=True, eq=False)
class PruferTrace:
    """Phase and amplitude along [1, Y_max] with the truncated limit phase."""

    omega: float
    y_nodes: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    amplitude_log: np.ndarray
    theta_bar: float
    tail_bound: float
    y_max: float

    def amplitude_identity_error(self) -> float:
        """max |rho - exp(-1/2 int A)| along the trace."""
        return float(np.max(np.abs(self.rho - np.exp(-0.5 * self.amplitude_log))))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"y": self.y_nodes, "theta": self.theta, "rho": self.rho})


def _require_focusing(p: Profile, omega: float) -> None:
    kappa2 = p.constants().kappa2
    if not omega > kappa2:
        raise ForbiddenOmega(
            f"Mode-zero phase analysis needs Omega > kappa2={kappa2}, got {omega}",
            {"omega": omega, "kappa2": kappa2},
        )


def phase_majorant(p: Profile, omega: float) -> float:
    """Constant C with nu <= C on [0, 1], from a Chebyshev sample."""
    r = chebyshev_grid(256)
    return MAJORANT_SAFETY * float(np.max(np.asarray(p.nu(omega, r))))


def tail_bound(y: float, majorant: float) -> float:
    """int_y^inf (1/(s^2 - s) + C/s^2) ds."""
    return math.log(y / (y - 1.0)) + majorant / y


def truncation_point(majorant: float, tol: float) -> float:
    """
    Smallest practical Y with tail_bound(Y) < tol.

    Raises:
        TailNotConverged: If that Y exceeds the cap
    """
    # tail_bound(Y) <= (1 + C)/(Y - 1)
    y = 1.0 + 1.01 * (1.0 + majorant) / tol
    if y > Y_CAP:
        raise TailNotConverged(
            f"Phase tail needs Y={y:.3g} > cap {Y_CAP:.0e} (C={majorant:.4g}, tol={tol})",
            {"majorant": majorant, "tol": tol, "bound_at_cap": tail_bound(Y_CAP, majorant)},
        )
    return y


def prufer_trace(
    p: Profile,
    omega: float,
    tol: float = DEFAULT_TOL,
    y_max: Optional[float] = None,
    n_nodes: int = 200,
) -> PruferTrace:
    """
    Integrate the phase/amplitude system from y = 1 to Y_max.

    Args:
        p: Validated profile
        omega: Angular velocity above kappa2
        tol: Target for the phase tail bound
        y_max: Fixed truncation point; chosen from the tail bound when omitted
        n_nodes: Output nodes, log-spaced in y

    Returns:
        PruferTrace

    Raises:
        ForbiddenOmega: If Omega <= kappa2
        TailNotConverged: If the tail bound cannot reach tol below the cap
    """
    _require_focusing(p, omega)
    majorant = phase_majorant(p, omega)
    if y_max is None:
        y_max = truncation_point(majorant, tol)
    bound = tail_bound(y_max, majorant)
    if bound >= tol:
        raise TailNotConverged(
            f"Tail bound {bound:.3e} at Y={y_max:.3g} not below tol {tol}",
            {"tail_bound": bound, "y_max": y_max},
        )

    # Series start of the radial solution u = 1 - nu(0) r^2/4
    nu0 = float(p.nu(omega, 0.0))
    r0 = START_RADIUS
    u, ru_prime = 1.0 - nu0 * r0 * r0 / 4.0, -nu0 * r0 * r0 / 2.0
    theta0 = math.atan2(u, ru_prime)
    rho0 = math.hypot(u, ru_prime)
    t0, t1 = -math.log(1.0 - r0), math.log(y_max)

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        theta, rho, _ = state
        y = math.exp(t)
        P = y * y - y
        q = (y - 1.0) / y**3 * float(p.mu0(omega, 1.0 - 1.0 / y, check=False))
        s, c = math.sin(theta), math.cos(theta)
        return y * np.array(
            [
                c * c / P + q * s * s,
                (1.0 / P - q) * rho * s * c,
                (-1.0 / P + q) * 2.0 * s * c,
            ]
        )

    t_eval = np.linspace(t0, t1, n_nodes)
    result = solve_ivp(
        rhs, (t0, t1), [theta0, rho0, -2.0 * math.log(rho0)], method="DOP853", t_eval=t_eval, rtol=1e-10, atol=1e-12
    )
    if not result.success:
        raise ToleranceNotMet(f"Prufer integration failed at Omega={omega}: {result.message}")

    y_nodes = np.concatenate(([1.0], np.exp(result.t)))
    theta = np.concatenate(([0.5 * math.pi], result.y[0]))
    rho = np.concatenate(([1.0], result.y[1]))
    amplitude_log = np.concatenate(([0.0], result.y[2]))
    theta_bar = float(result.y[0, -1])
    logger.debug(f"Prufer Omega={omega}: theta_bar={theta_bar:.10g}, Y={y_max:.3g}, tail={bound:.2e}")
    return PruferTrace(
        omega=omega,
        y_nodes=y_nodes,
        theta=theta,
        rho=rho,
        amplitude_log=amplitude_log,
        theta_bar=theta_bar,
        tail_bound=bound,
        y_max=y_max,
    )


def kneser_margin(p: Profile, omega: float, y: float) -> float:
    """
    y^2 V(y) = y^2 / (4 (y^2 - y)^2) + nu(1 - 1/y) / y^2.

    Non-oscillation at infinity holds when this stays below 1/4 for large y.

    Raises:
        ForbiddenOmega: If Omega < kappa2
    """
    kappa2 = p.constants().kappa2
    if omega < kappa2:
        raise ForbiddenOmega(f"Kneser margin needs Omega >= kappa2={kappa2}, got {omega}")
    if not y > 1.0:
        raise ValueError(f"y must exceed 1, got {y}")
    potential = float(p.mu0(omega, 1.0 - 1.0 / y, check=False))
    return y * y / (4.0 * (y * y - y) ** 2) + potential / (y * y)


def mode0_exceptional_set(
    p: Profile,
    omega_window: Tuple[float, float],
    grid: int = 64,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> List[float]:
    """
    Omega values in the window where theta_bar crosses a multiple of pi.

    One truncation point, set by the largest potential in the window, is
    shared by all samples so theta_bar is a continuous function of Omega.

    Args:
        p: Validated profile
        omega_window: (lo, hi) inside (kappa2, inf)
        grid: Number of Omega samples
        tol: Tail tolerance and root width
        threads: Worker cap for the sample sweep

    Returns:
        Ascending list of exceptional Omega values
    """
    lo, hi = omega_window
    if not lo < hi:
        raise ValueError(f"Empty window ({lo}, {hi})")
    _require_focusing(p, lo)
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")

    # nu decreases in Omega on the focusing side, so lo carries the worst majorant
    y_max = truncation_point(phase_majorant(p, lo), tol)

    def theta_bar(omega: float) -> float:
        return prufer_trace(p, omega, tol=tol, y_max=y_max, n_nodes=2).theta_bar

    omegas = np.linspace(lo, hi, grid)
    values = parallel_map(theta_bar, omegas, threads)

    crossings: List[float] = []
    for a, b, ta, tb in zip(omegas[:-1], omegas[1:], values[:-1], values[1:]):
        low, high = min(ta, tb), max(ta, tb)
        for k in range(math.ceil(low / math.pi), math.floor(high / math.pi) + 1):
            target = k * math.pi
            if ta == target:
                root = float(a)
            elif tb == target:
                root = float(b)
            else:
                root = brentq(lambda w: theta_bar(w) - target, a, b, xtol=tol)
            if not crossings or abs(root - crossings[-1]) > tol:
                crossings.append(float(root))
    logger.info(f"Mode-zero exceptional set on [{lo}, {hi}]: {len(crossings)} value(s)")
    return crossings
