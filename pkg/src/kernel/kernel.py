"""
Kernel Generator

At a dispersion root Omega_m the mode-m kernel is spanned by

    h*(r) = r^m F(r) mu0(r) (Q(r) - Q(1)),
    Q(r) = int_0^r P(s) / (F(s)^2 s^(2m+1)) ds,
    P(s) = int_0^s F(t) t^(2m+1) (Omega_m - f0(t)/2) dt.

Every nested integral is carried as an extra state of a single ODE solve
together with the generator F, in scaled form (powers of r divided out) so
nothing cancels near r = 0. The same solve also accumulates the
transversality integrals.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from src.dispersion import zeta
from src.errors import NotARoot, ToleranceNotMet
from src.modes import G_n, G_n_scaled
from src.numerics import chebyshev_grid, radial_quadrature
from src.profile import Profile
from src.sturm import solve_generator

logger = logging.getLogger(__name__)

SERIES_RADIUS = 1e-3
DEFAULT_GRID = 512

# State layout of the kernel system
F, FP, P_HAT, Q, E_A, E_B, I_A, I_B, J1_A, J1_B, J2, J3 = range(12)
N_STATES = 12


@dataclass(frozen=True, eq=False)
class KernelSystem:
    """Dense solution of the coupled generator / kernel / transversality states."""

    profile: Profile
    m: int
    omega: float
    final: np.ndarray
    boundary_gap: float
    _dense: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _series: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]] = field(repr=False)

    def states(self, r: np.ndarray) -> np.ndarray:
        """All states at radii r, shape (12, len(r)); F and F' use the series below r0."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        values = np.array(self._dense(np.clip(r, SERIES_RADIUS, 1.0)))
        small = r < SERIES_RADIUS
        if np.any(small):
            values[F, small], values[FP, small] = self._series(r[small])
        return values

    @property
    def q_at_1(self) -> float:
        return float(self.final[Q])

    @property
    def boundary_moment(self) -> float:
        """H_m[h*](1) = int_0^1 s^(m+1) h*(s) ds."""
        return float(self.final[E_A] - self.q_at_1 * self.final[E_B])

    def h_star(self, r: np.ndarray) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        s = self.states(r)
        mu = np.asarray(self.profile.mu0(self.omega, r, check=False))
        return r**self.m * s[F] * mu * (s[Q] - self.q_at_1)

    def d_star(self, r: np.ndarray) -> np.ndarray:
        """
        Transversality datum d*(r) = h*(r) r / f0'(r) + r G_m(r) / (4(m+1) G_m(1)) - r^(m+2) / (4(m+1)).
        """
        p, m = self.profile, self.m
        r = np.atleast_1d(np.asarray(r, dtype=float))
        scale = 4.0 * (m + 1)
        return (
            self.h_star(r) / np.asarray(p.slope_ratio(r))
            + r**m * np.asarray(G_n_scaled(p, self.omega, m, r)) / (scale * self.boundary_gap)
            - r ** (m + 2) / scale
        )


def solve_kernel_system(p: Profile, m: int, omega: float, rtol: float = 1e-12) -> KernelSystem:
    """
    Integrate the generator and every integral the kernel and transversality need.

    Args:
        p: Validated profile
        m: Symmetry
        omega: Angular velocity outside [kappa1, kappa2]
        rtol: Relative tolerance of the integrator

    Returns:
        KernelSystem

    Raises:
        ForbiddenOmega: If Omega lies in [kappa1, kappa2]
        ToleranceNotMet: If the integrator fails
    """
    sigma = p.sigma(omega)
    mu_0 = float(p.mu0(omega, 0.0))
    f0_0 = float(p.f0(0.0))
    weight = 2 * m + 2
    r0 = SERIES_RADIUS

    def series(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return 1.0 - mu_0 * r * r / (2.0 * weight), -mu_0 * r / weight

    F0, Fp0 = series(np.array([r0]))
    p_hat0 = (omega - 0.5 * f0_0) / weight
    q0 = 0.5 * r0 * r0 * p_hat0
    y0 = np.zeros(N_STATES)
    y0[F], y0[FP] = F0[0], Fp0[0]
    y0[P_HAT], y0[Q] = p_hat0, q0
    y0[E_A], y0[E_B] = mu_0 * q0 / (weight + 2), mu_0 / weight
    y0[I_B] = 0.5 * mu_0 * r0 * r0

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        mu = float(p.mu0(omega, r, check=False))
        nu = sigma * mu
        gap = omega - float(p.inner_mean(r))
        f0 = float(p.f0(r))
        scaled_g = float(G_n_scaled(p, omega, m, r))
        Fv = y[F]
        r_pow = r ** (2 * m + 1)
        g_b = Fv * mu
        # mu0 / (f0'(r)/r) = 1 / (Omega - inner_mean)
        weight_1 = 4.0 * (m + 1) * nu * r_pow * Fv * Fv / gap
        dy = np.empty(N_STATES)
        dy[F] = y[FP]
        dy[FP] = -(2 * m + 1) / r * y[FP] - mu * Fv
        dy[P_HAT] = (Fv * (omega - 0.5 * f0) - weight * y[P_HAT]) / r
        dy[Q] = r * y[P_HAT] / (Fv * Fv)
        dy[E_A] = (g_b * y[Q] - weight * y[E_A]) / r
        dy[E_B] = (g_b - weight * y[E_B]) / r
        dy[I_A] = r * g_b * y[Q]
        dy[I_B] = r * g_b
        dy[J1_A] = weight_1 * y[Q]
        dy[J1_B] = weight_1
        dy[J2] = -nu * r_pow * r * r * Fv
        dy[J3] = nu * r_pow * Fv * scaled_g
        return dy

    result = solve_ivp(rhs, (r0, 1.0), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-2, dense_output=True)
    if not result.success:
        logger.error(f"Kernel system failed (m={m}, Omega={omega}): {result.message}")
        raise ToleranceNotMet(f"Kernel system integration failed: {result.message}", {"m": m, "omega": omega})

    return KernelSystem(
        profile=p,
        m=m,
        omega=omega,
        final=result.y[:, -1].copy(),
        boundary_gap=float(G_n(p, omega, m, 1.0)),
        _dense=result.sol,
        _series=series,
    )


@dataclass(frozen=True, eq=False)
class KernelGenerator:
    """Sampled kernel generator h* with its self-checks."""

    m: int
    omega_m: float
    grid: np.ndarray
    h_star: np.ndarray
    normalization_check: float
    kernel_residual: float
    system: KernelSystem = field(repr=False)

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        return self.system.h_star(r)

    def d_star(self, r: np.ndarray) -> np.ndarray:
        return self.system.d_star(r)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.grid, "h_star": self.h_star})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "omega_m": self.omega_m,
            "normalization_check": self.normalization_check,
            "expected_normalization": 1.0 / (2 * (self.m + 1)),
            "kernel_residual": self.kernel_residual,
            "h_star_at_1": float(self.h_star[-1]),
        }


def require_root(p: Profile, m: int, omega_m: float, tol: float) -> float:
    """
    Check that Omega_m is a dispersion root.

    Raises:
        NotARoot: If |zeta_m(Omega_m)| exceeds tol
    """
    residual = abs(zeta(p, omega_m, m, tol=max(tol, 1e-12)))
    if residual > tol:
        raise NotARoot(
            f"|zeta_{m}({omega_m})| = {residual:.3e} exceeds tol {tol:.1e}",
            {"m": m, "omega_m": omega_m, "residual": residual},
        )
    return residual


def _kernel_residual(system: KernelSystem, r: np.ndarray) -> float:
    """sup |mu0 L_m[h*]| with A_m = -H_m[h*](1) / (2 G_m(1))."""
    p, m, omega = system.profile, system.m, system.omega
    r = r[r > 0]
    s = system.states(r)
    q1 = system.q_at_1
    final = system.final
    tail = (final[I_A] - s[I_A]) - q1 * (final[I_B] - s[I_B])
    head = r * r * (s[E_A] - q1 * s[E_B])
    scaled_g = np.asarray(G_n_scaled(p, omega, m, r))
    bracket = (
        s[F] * (s[Q] - q1)
        - (head + tail) / (2 * m)
        + system.boundary_moment * scaled_g / (2 * m * system.boundary_gap)
    )
    mu = np.asarray(p.mu0(omega, r, check=False))
    return float(np.max(np.abs(r**m * mu * bracket)))


def kernel_generator(
    p: Profile, m: int, omega_m: float, tol: float = 1e-10, grid_size: int = DEFAULT_GRID
) -> KernelGenerator:
    """
    Build the kernel generator h* at a certified root.

    Args:
        p: Validated profile
        m: Symmetry
        omega_m: Root of zeta_m
        tol: Root tolerance
        grid_size: Chebyshev sampling grid

    Returns:
        KernelGenerator with h*(1) = 0 and normalization -H_m[h*](1)/G_m(1)

    Raises:
        NotARoot: If |zeta_m(omega_m)| > tol
    """
    require_root(p, m, omega_m, tol)
    system = solve_kernel_system(p, m, omega_m)
    grid = chebyshev_grid(grid_size)
    h = system.h_star(grid)
    h[-1] = 0.0
    normalization = -system.boundary_moment / system.boundary_gap
    residual = _kernel_residual(system, grid)
    expected = 1.0 / (2 * (m + 1))
    if abs(normalization - expected) > 100 * tol + 1e-8:
        logger.warning(f"Kernel normalization {normalization:.12g} differs from {expected:.12g}")
    logger.info(f"Kernel generator m={m}: normalization={normalization:.12g}, residual={residual:.2e}")
    return KernelGenerator(
        m=m,
        omega_m=omega_m,
        grid=grid,
        h_star=h,
        normalization_check=normalization,
        kernel_residual=residual,
        system=system,
    )


def verify_kernel_ode(
    p: Profile, m: int, omega_m: float, kg: Optional[KernelGenerator] = None, tol: float = 1e-10
) -> float:
    """
    Re-solve F_m'' + ((2m+1)/r) F_m' + mu0 F_m = Omega_m - f0/2 with an implicit
    stepper and compare against F_m = F (Q - Q(1)) from the kernel system.

    Returns:
        Max deviation on the grid nodes beyond r0
    """
    if kg is None:
        kg = kernel_generator(p, m, omega_m, tol=tol)
    system, omega = kg.system, kg.omega_m
    r0 = SERIES_RADIUS
    s0 = system.states(np.array([r0]))[:, 0]
    q1 = system.q_at_1
    y0 = [s0[F] * (s0[Q] - q1), s0[FP] * (s0[Q] - q1) + r0 * s0[P_HAT] / s0[F]]

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        mu = float(p.mu0(omega, r, check=False))
        return np.array([y[1], omega - 0.5 * float(p.f0(r)) - (2 * m + 1) / r * y[1] - mu * y[0]])

    nodes = kg.grid[kg.grid >= r0]
    result = solve_ivp(rhs, (r0, 1.0), y0, method="Radau", t_eval=nodes, rtol=1e-10, atol=1e-13)
    if not result.success:
        raise ToleranceNotMet(f"Kernel ODE re-solve failed: {result.message}")
    s = system.states(nodes)
    reference = s[F] * (s[Q] - q1)
    deviation = float(np.max(np.abs(result.y[0] - reference)))
    logger.debug(f"Kernel ODE re-solve deviation: {deviation:.2e}")
    return deviation


def range_density(p: Profile, m: int, omega_m: float, r, tol: float = 1e-10):
    """
    Radial part nu(r) F_m(r) r^m of the linear form whose kernel is the range.

    Raises:
        NotARoot: If Omega_m is not a root within tol
    """
    require_root(p, m, omega_m, tol)
    sol = solve_generator(p, omega_m, m, tol=max(tol, 1e-12), grid_size=65)
    r_arr = np.asarray(r, dtype=float)
    values = np.asarray(p.nu(omega_m, r_arr)) * np.asarray(sol.evaluate(np.atleast_1d(r_arr))).reshape(
        r_arr.shape
    ) * r_arr**m
    return float(values) if np.ndim(r) == 0 else values


def range_membership(
    p: Profile, m: int, omega_m: float, d: Callable[[np.ndarray], np.ndarray], tol: float = 1e-10
) -> float:
    """
    int_0^1 nu F_m r^(m+1) d(r) dr; zero when d cos(m theta) lies in the range.

    Args:
        p: Validated profile
        m: Symmetry
        omega_m: Root of zeta_m
        d: Radial datum, vectorized callable
        tol: Root tolerance

    Raises:
        NotARoot: If Omega_m is not a root within tol
    """
    require_root(p, m, omega_m, tol)
    sol = solve_generator(p, omega_m, m, tol=max(tol, 1e-12), grid_size=65)
    r, w = radial_quadrature()
    density = np.asarray(p.nu(omega_m, r)) * np.asarray(sol.evaluate(r)) * r ** (m + 1)
    return float(np.sum(w * density * np.asarray(d(r), dtype=float)))


def d_star(p: Profile, m: int, omega_m: float, r, tol: float = 1e-10):
    """Transversality datum d*_m at radii r; see KernelSystem.d_star."""
    require_root(p, m, omega_m, tol)
    system = solve_kernel_system(p, m, omega_m)
    values = system.d_star(np.atleast_1d(np.asarray(r, dtype=float)))
    return float(values[0]) if np.ndim(r) == 0 else values
