"""
Generator Solver

The normalized regular solution F of

    F'' + ((2n+1)/r) F' + mu0(r) F = 0,   F(0) = 1, F'(0) = 0,

equivalently of the Volterra equation

    F(r) = 1 - (1/2n) int_0^r [1 - (s/r)^(2n)] s mu0(s) F(s) ds.

The primary path propagates the ODE from a two-term series at r0 with an
explicit high-order Runge-Kutta scheme and then checks the Volterra residual
with an independent Gauss-Legendre rule. A Chebyshev-Nystrom discretization
of the Volterra equation (damped Picard with collocation fallback) is kept as
a second, independent solver.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.integrate import solve_ivp
from scipy.interpolate import BarycentricInterpolator
from scipy.special import hyp2f1

from src.errors import NoContraction, ToleranceNotMet, WrongRegime
from src.numerics import chebyshev_grid, gauss_legendre, radial_quadrature
from src.profile import Profile

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
# Extra quadrature states: g(r, F, F') integrated from r0 to 1 alongside F
Integrand = Callable[[float, float, float], float]

SERIES_RADIUS = 1e-3
DEFAULT_GRID = 512
MIN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GeneratorSolution:
    """F and F' of the mode-n generator sampled on a radial grid."""

    n: int
    omega: float
    grid: np.ndarray
    F: np.ndarray
    Fprime: np.ndarray
    F_at_1: float
    Fprime_at_1: float
    residual: float
    regime: str
    contraction: float
    monotone: bool
    method: str = "ode"
    integrals: Dict[str, float] = field(default_factory=dict)
    _evaluator: Optional[Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]] = field(
        default=None, repr=False, compare=False
    )

    def evaluate(self, r: ArrayLike) -> ArrayLike:
        """F at arbitrary radii in [0, 1]."""
        values, _ = self._evaluate_pair(r)
        return float(values[0]) if np.ndim(r) == 0 else values

    def evaluate_derivative(self, r: ArrayLike) -> ArrayLike:
        """F' at arbitrary radii in [0, 1]."""
        _, derivs = self._evaluate_pair(r)
        return float(derivs[0]) if np.ndim(r) == 0 else derivs

    def _evaluate_pair(self, r: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        if self._evaluator is None:
            return np.interp(r_arr, self.grid, self.F), np.interp(r_arr, self.grid, self.Fprime)
        return self._evaluator(r_arr)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r": self.grid, "F": self.F, "Fprime": self.Fprime})


def _series(mu0_at_0: float, n: int, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    F = 1.0 - mu0_at_0 * r * r / (2.0 * (2 * n + 2))
    Fp = -mu0_at_0 * r / (2 * n + 2)
    return F, Fp


def _volterra_image(
    p: Profile,
    omega: float,
    n: int,
    r_nodes: np.ndarray,
    evaluate: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """1 - (r^2/2n) int_0^1 (1 - u^(2n)) u mu0(r u) F(r u) du at every node."""
    order = max(96, 2 * n + 48)
    out = np.ones_like(r_nodes)
    if p.kind == "polynomial":
        u, w = gauss_legendre(order)
        interior = r_nodes > 0
        points = np.outer(r_nodes[interior], u)
        values = (1.0 - u ** (2 * n)) * u * np.asarray(p.mu0(omega, points, check=False)) * evaluate(
            points.ravel()
        ).reshape(points.shape)
        out[interior] = 1.0 - r_nodes[interior] ** 2 / (2 * n) * (values @ w)
        return out

    # Piecewise-cubic tables: split each row at the interpolation knots
    knots = np.sqrt(np.asarray(p.table_x)[1:-1])
    panel_order = 24
    for i, r in enumerate(r_nodes):
        if r <= 0:
            continue
        breaks = np.concatenate(([0.0], knots[knots < r] / r, [1.0]))
        total = 0.0
        for a, b in zip(breaks[:-1], breaks[1:]):
            u, w = gauss_legendre(panel_order, a, b)
            vals = (1.0 - u ** (2 * n)) * u * np.asarray(p.mu0(omega, r * u, check=False)) * evaluate(r * u)
            total += float(vals @ w)
        out[i] = 1.0 - r * r / (2 * n) * total
    return out


def contraction_constant(p: Profile, omega: float, n: int) -> float:
    """Sup-norm bound (1/2n) int_0^1 s nu(s) ds of the Volterra operator."""
    s, w = radial_quadrature()
    return float(np.sum(w * s * np.asarray(p.nu(omega, s)))) / (2 * n)


def _check_monotone(F: np.ndarray, sigma: int, tol: float) -> bool:
    # Defocusing: increasing; focusing: decreasing. Ties at roundoff level pass.
    steps = np.diff(F) * (-sigma)
    return bool(np.all(steps > -tol * max(1.0, float(np.max(np.abs(F))))))


def solve_generator(
    p: Profile,
    omega: float,
    n: int,
    tol: float = 1e-10,
    grid_size: int = DEFAULT_GRID,
    integrands: Optional[Dict[str, Integrand]] = None,
) -> GeneratorSolution:
    """
    Solve for the mode-n generator F at angular velocity Omega.

    Args:
        p: Validated profile
        omega: Angular velocity outside [kappa1, kappa2]
        n: Mode index >= 1
        tol: Volterra residual tolerance, at least 1e-12
        grid_size: Chebyshev sampling grid size
        integrands: Optional g(r, F, F') integrated over (0, 1] with the same solve

    Returns:
        GeneratorSolution

    Raises:
        ForbiddenOmega: If Omega lies in [kappa1, kappa2]
        ToleranceNotMet: If the integrator fails or the residual exceeds tol
    """
    if n < 1:
        raise ValueError(f"Mode index must be >= 1, got {n}")
    if tol < MIN_TOL:
        raise ValueError(f"tol must be >= {MIN_TOL}, got {tol}")
    sigma = p.sigma(omega)
    regime = "defocusing" if sigma < 0 else "focusing"
    integrands = dict(integrands or {})
    names = list(integrands)
    mu0_at_0 = float(p.mu0(omega, 0.0))

    r0 = SERIES_RADIUS
    F0, Fp0 = _series(mu0_at_0, n, np.array([r0]))
    y0 = np.concatenate(([F0[0], Fp0[0]], np.zeros(len(names))))
    weight = 2 * n + 1

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        mu = float(p.mu0(omega, r, check=False))
        dy = np.empty_like(y)
        dy[0] = y[1]
        dy[1] = -weight / r * y[1] - mu * y[0]
        for k, name in enumerate(names):
            dy[2 + k] = integrands[name](r, y[0], y[1])
        return dy

    rtol = max(tol * 1e-2, 1e-13)
    result = solve_ivp(rhs, (r0, 1.0), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-2, dense_output=True)
    if not result.success:
        logger.error(f"Generator integration failed (n={n}, Omega={omega}): {result.message}")
        raise ToleranceNotMet(
            f"Generator integration failed: {result.message}", {"n": n, "omega": omega}
        )
    dense = result.sol

    def evaluator(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        F = np.empty_like(r)
        Fp = np.empty_like(r)
        small = r < r0
        if np.any(small):
            F[small], Fp[small] = _series(mu0_at_0, n, r[small])
        if np.any(~small):
            states = dense(np.clip(r[~small], r0, 1.0))
            F[~small], Fp[~small] = states[0], states[1]
        return F, Fp

    grid = chebyshev_grid(grid_size)
    F, Fp = evaluator(grid)
    F[0], Fp[0] = 1.0, 0.0

    image = _volterra_image(p, omega, n, grid, lambda r: evaluator(r)[0])
    scale = max(1.0, float(np.max(np.abs(F))))
    residual = float(np.max(np.abs(F - image))) / scale

    contraction = contraction_constant(p, omega, n)
    monotone = _check_monotone(F, sigma, tol)
    if sigma > 0 and contraction >= 1.0:
        logger.warning(
            f"Contraction margin violated for n={n}, Omega={omega}: L={contraction:.4g}; "
            f"using the propagated solution"
        )
    if not monotone:
        logger.warning(f"Generator not monotone for n={n}, Omega={omega} ({regime})")

    if residual > tol:
        raise ToleranceNotMet(
            f"Volterra residual {residual:.3e} exceeds tol {tol:.1e} (n={n}, Omega={omega})",
            {"n": n, "omega": omega, "residual": residual, "tol": tol},
        )

    final = result.y[:, -1]
    logger.debug(f"Generator n={n}, Omega={omega}: F(1)={final[0]:.12g}, residual={residual:.2e}")
    return GeneratorSolution(
        n=n,
        omega=omega,
        grid=grid,
        F=F,
        Fprime=Fp,
        F_at_1=float(final[0]),
        Fprime_at_1=float(final[1]),
        residual=residual,
        regime=regime,
        contraction=contraction,
        monotone=monotone,
        method="ode",
        integrals={name: float(final[2 + k]) for k, name in enumerate(names)},
        _evaluator=evaluator,
    )


def solve_generator_volterra(
    p: Profile,
    omega: float,
    n: int,
    tol: float = 1e-10,
    grid_size: int = 96,
    max_iter: int = 500,
) -> GeneratorSolution:
    """
    Chebyshev-Nystrom solve of the Volterra form.

    Damped Picard iteration F <- (1 - w) F + w (1 - W F) runs while the
    measured step ratio stays below one; otherwise the collocation system
    (I + W) F = 1 is solved directly.

    Raises:
        NoContraction: If both the iteration and the collocation solve fail the
            discrete residual check; carries the measured Lipschitz estimate
    """
    if n < 1:
        raise ValueError(f"Mode index must be >= 1, got {n}")
    sigma = p.sigma(omega)
    regime = "defocusing" if sigma < 0 else "focusing"
    nodes = chebyshev_grid(grid_size)
    order = max(96, 2 * n + 48)
    u, w = gauss_legendre(order)

    points = np.outer(nodes, u)
    basis = BarycentricInterpolator(nodes, np.eye(grid_size))(points.ravel()).reshape(
        grid_size, order, grid_size
    )
    mu = np.asarray(p.mu0(omega, points, check=False))
    W = (nodes**2 / (2 * n))[:, None] * np.einsum("q,iq,iqj->ij", w, (1.0 - u ** (2 * n)) * u * mu, basis)
    Wp = -nodes[:, None] * np.einsum("q,iq,iqj->ij", w, u ** (2 * n + 1) * mu, basis)
    ones = np.ones(grid_size)

    lipschitz = float(np.max(np.sum(np.abs(W), axis=1)))
    damping = 1.0 if lipschitz < 1.0 else 1.0 / (1.0 + lipschitz)
    F = ones.copy()
    previous: Optional[float] = None
    ratio = 0.0
    converged = False
    for iteration in range(max_iter):
        update = (1.0 - damping) * F + damping * (ones - W @ F)
        step = float(np.max(np.abs(update - F)))
        F = update
        if previous is not None and previous > 0:
            ratio = step / previous
        previous = step
        if step <= tol * 1e-2:
            converged = True
            break
        if iteration > 5 and ratio >= 1.0:
            break

    if not converged:
        logger.info(f"Picard stalled (ratio={ratio:.3g}); solving collocation system directly")
        F = linalg.solve(np.eye(grid_size) + W, ones)
    discrete = float(np.max(np.abs(F + W @ F - ones)))
    if discrete > tol:
        raise NoContraction(
            f"Volterra solve failed for n={n}, Omega={omega}: residual {discrete:.3e}",
            {"n": n, "omega": omega, "lipschitz": lipschitz, "measured_ratio": ratio},
        )

    Fp = Wp @ F
    F_interp = BarycentricInterpolator(nodes, F)
    Fp_interp = BarycentricInterpolator(nodes, Fp)

    def evaluator(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(F_interp(r)), np.asarray(Fp_interp(r))

    image = _volterra_image(p, omega, n, nodes, lambda r: evaluator(r)[0])
    residual = float(np.max(np.abs(F - image))) / max(1.0, float(np.max(np.abs(F))))
    return GeneratorSolution(
        n=n,
        omega=omega,
        grid=nodes,
        F=F,
        Fprime=Fp,
        F_at_1=float(F[-1]),
        Fprime_at_1=float(Fp[-1]),
        residual=residual,
        regime=regime,
        contraction=ratio if converged else lipschitz,
        monotone=_check_monotone(F, sigma, tol),
        method="volterra",
        _evaluator=evaluator,
    )


def hypergeometric_generator(p: Profile, omega: float, n: int, r: ArrayLike) -> ArrayLike:
    """
    Closed-form generator for f0 = B + A r^2.

    F(r) = 2F1(a, b; n+1; A r^2 / (4 (Omega - B/2))) with a, b = (n +- sqrt(n^2 + 8)) / 2.

    Raises:
        ValueError: If the profile is not quadratic in r
    """
    coeffs = list(p.coeffs) if p.kind == "polynomial" else []
    while len(coeffs) > 2 and coeffs[-1] == 0.0:
        coeffs.pop()
    if len(coeffs) != 2:
        raise ValueError("Hypergeometric closed form needs f0 = B + A r^2")
    p.sigma(omega)
    B, A = coeffs
    root = np.sqrt(n * n + 8.0)
    a, b = 0.5 * (n + root), 0.5 * (n - root)
    r_arr = np.asarray(r, dtype=float)
    z = A * r_arr**2 / (4.0 * (omega - 0.5 * B))
    values = hyp2f1(a, b, n + 1.0, z)
    return float(values) if np.ndim(r) == 0 else values


def rho_gap(sol: GeneratorSolution, r: ArrayLike) -> ArrayLike:
    """
    rho(r) = F(r) - F(1) in the focusing regime.

    Raises:
        WrongRegime: For defocusing solutions
    """
    if sol.regime != "focusing":
        raise WrongRegime(f"rho_gap needs a focusing solution, got {sol.regime}")
    values = np.atleast_1d(sol.evaluate(np.atleast_1d(np.asarray(r, dtype=float)))) - sol.F_at_1
    return float(values[0]) if np.ndim(r) == 0 else values


def rho_bounds(
    sol: GeneratorSolution, p: Profile, r: ArrayLike, c0: float, theta: float = 1.0
) -> Tuple[Any, Any]:
    """
    Two-sided bounds on rho(r):

        (1 - r) / (C0 n (Omega - kappa1)) <= rho(r) <= C0 (1 - r)^theta / (theta n (Omega - kappa2)^theta)
    """
    if sol.regime != "focusing":
        raise WrongRegime(f"rho_bounds needs a focusing solution, got {sol.regime}")
    c = p.constants()
    r_arr = np.asarray(r, dtype=float)
    lower = (1.0 - r_arr) / (c0 * sol.n * (sol.omega - c.kappa1))
    upper = c0 * (1.0 - r_arr) ** theta / (theta * sol.n * (sol.omega - c.kappa2) ** theta)
    if np.ndim(r) == 0:
        return float(lower), float(upper)
    return lower, upper
