"""
Nystrom Operators

Quadrature discretization of the self-adjoint operators L_0 and L_n acting on
L^2 with the measure d(lambda) = (s / nu(s)) ds.

The discretization is Galerkin-symmetric: the bilinear form

    <L_n h, g> = (1/2n) H(1) G(1) + int_0^1 a_h(r) a_g(r) / r dr,
    a_h(r) = r^(-n) int_0^r s^(n+1) h(s) ds,   H(1) = int_0^1 s^(n+1) h ds,

is assembled exactly for polynomial interpolants on Gauss-Legendre nodes
(the first term is dropped for n = 0). The form matrix B is nu-free; the
operator matrix is M = G^-1 B with the mass diagonal G = w s / nu.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import legvander
from scipy import linalg

from src.errors import EigenSolveFailure, NearSingular
from src.numerics import adaptive_quad, gauss_legendre
from src.profile import Profile

logger = logging.getLogger(__name__)

MIN_SIZE = 16
COND_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-10


@dataclass(frozen=True, eq=False)
class NystromOperator:
    """
    Discretized L_n at angular velocity Omega.

    Attributes:
        n: Mode index, 0 for the radial operator
        omega: Angular velocity
        sigma: -1 defocusing, +1 focusing
        nodes: Gauss-Legendre abscissae in (0, 1), ascending
        quad_weights: Plain Gauss-Legendre weights
        weights: Quadrature weights of the measure lambda, w s / nu
        form: Symmetric matrix of the bilinear form <L h, g>
        matrix: Operator matrix G^-1 B acting on nodal values
    """

    n: int
    omega: float
    sigma: int
    nodes: np.ndarray
    quad_weights: np.ndarray
    weights: np.ndarray
    form: np.ndarray
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def apply(self, h: np.ndarray) -> np.ndarray:
        """L h at the nodes."""
        return self.matrix @ np.asarray(h, dtype=float)

    def inner(self, h: np.ndarray, g: np.ndarray) -> float:
        """<h, g> in the lambda inner product."""
        return float(np.sum(self.weights * np.asarray(h) * np.asarray(g)))

    def symmetric_matrix(self) -> np.ndarray:
        """D^(1/2) M D^(-1/2) with D = diag(weights)."""
        scale = 1.0 / np.sqrt(self.weights)
        return scale[:, None] * self.form * scale[None, :]


def _cumulative_moments(nodes: np.ndarray, n: int) -> np.ndarray:
    """Rows r_i^2 int_0^1 u^(n+1) l_j(r_i u) du of the map h -> a_h(r_i)."""
    size = len(nodes)
    order = (n + size) // 2 + 2
    u, w = gauss_legendre(order)
    vander_inv = linalg.inv(legvander(2.0 * nodes - 1.0, size - 1))
    rows = np.empty((size, size))
    for i, r in enumerate(nodes):
        basis = legvander(2.0 * r * u - 1.0, size - 1) @ vander_inv
        rows[i] = r * r * ((w * u ** (n + 1)) @ basis)
    return rows


def discretize(p: Profile, omega: float, n: int, N: int) -> NystromOperator:
    """
    Discretize L_n at Omega on N Gauss-Legendre nodes.

    Args:
        p: Validated profile
        omega: Angular velocity outside [kappa1, kappa2]
        n: Mode index >= 0
        N: Number of nodes, at least 16

    Returns:
        NystromOperator

    Raises:
        ForbiddenOmega: If Omega lies in [kappa1, kappa2]
    """
    if N < MIN_SIZE:
        raise ValueError(f"N must be >= {MIN_SIZE}, got {N}")
    if n < 0:
        raise ValueError(f"Mode index must be >= 0, got {n}")
    sigma = p.sigma(omega)
    s, w = gauss_legendre(N)

    moments = _cumulative_moments(s, n)
    form = moments.T @ ((w / s)[:, None] * moments)
    if n >= 1:
        v = w * s ** (n + 1)
        form = form + np.outer(v, v) / (2 * n)
    form = 0.5 * (form + form.T)

    weights = w * s / np.asarray(p.nu(omega, s))
    matrix = form / weights[:, None]
    logger.debug(f"Discretized L_{n} at Omega={omega} on {N} nodes")
    return NystromOperator(
        n=n,
        omega=omega,
        sigma=sigma,
        nodes=s,
        quad_weights=w,
        weights=weights,
        form=form,
        matrix=matrix,
    )


def quadratic_form(op: NystromOperator, h: np.ndarray) -> float:
    """<L_n h, h> in the lambda inner product."""
    if op.n < 1:
        raise ValueError("quadratic_form is defined for n >= 1")
    h = np.asarray(h, dtype=float)
    return float(h @ op.form @ h)


def reduced_quadratic_form(h: Callable[[float], float], n: int) -> float:
    """
    nu-free value (1/2n) (int_0^1 h r^(n+1) dr)^2 + int_0^1 r^(-2n-1) (int_0^r s^(n+1) h ds)^2 dr.

    Evaluated by adaptive quadrature; the reference for ``quadratic_form``.
    """
    if n < 1:
        raise ValueError("reduced_quadratic_form is defined for n >= 1")
    boundary = adaptive_quad(lambda r: float(h(r)) * r ** (n + 1), 0.0, 1.0)

    def inner(r: float) -> float:
        if r <= 0:
            return 0.0
        # a(r) = r^2 int_0^1 u^(n+1) h(r u) du keeps the ratio bounded near 0
        a = r * r * adaptive_quad(lambda u: u ** (n + 1) * float(h(r * u)), 0.0, 1.0)
        return a * a / r

    return boundary**2 / (2 * n) + adaptive_quad(inner, 0.0, 1.0)


def _eigenvalues(op: NystromOperator) -> np.ndarray:
    try:
        values = linalg.eigvalsh(op.symmetric_matrix())
    except linalg.LinAlgError as e:
        logger.error(f"Eigen solve failed for L_{op.n} at Omega={op.omega}: {e}")
        raise EigenSolveFailure(f"Eigen solve failed: {e}", {"n": op.n, "omega": op.omega})
    if not np.all(np.isfinite(values)):
        raise EigenSolveFailure("Non-finite eigenvalues", {"n": op.n, "omega": op.omega})
    return values


def smallest_eigenvalue(op: NystromOperator) -> float:
    """Smallest eigenvalue of the symmetrized matrix."""
    return float(_eigenvalues(op)[0])


def spectrum(op: NystromOperator, k: int = 10) -> np.ndarray:
    """Leading k eigenvalues, descending."""
    values = _eigenvalues(op)[::-1]
    return values[: min(k, len(values))]


def operator_norm(op: NystromOperator) -> float:
    return float(_eigenvalues(op)[-1])


def hilbert_schmidt_norm(op: NystromOperator) -> float:
    return float(np.linalg.norm(op.symmetric_matrix(), "fro"))


def condition_number(op: NystromOperator) -> float:
    """Condition number of Id - sigma L from its eigenvalues."""
    shifted = np.abs(1.0 - op.sigma * _eigenvalues(op))
    smallest = float(np.min(shifted))
    return float(np.inf) if smallest == 0.0 else float(np.max(shifted)) / smallest


def solve_id_minus_L(op: NystromOperator, rhs: np.ndarray) -> np.ndarray:
    """
    Solve (Id - sigma L) h = rhs at the nodes.

    Solved as the symmetric system (G - sigma B) h = G rhs.

    Raises:
        NearSingular: If the condition number exceeds the limit or the residual check fails
    """
    rhs = np.asarray(rhs, dtype=float)
    scale = float(np.max(np.abs(rhs))) if rhs.size else 0.0
    if scale == 0.0:
        return np.zeros_like(rhs)

    cond = condition_number(op)
    if cond > COND_LIMIT:
        raise NearSingular(
            f"Id - sigma L_{op.n} near singular at Omega={op.omega}: cond={cond:.3e}",
            {"n": op.n, "omega": op.omega, "condition": cond},
        )
    system = np.diag(op.weights) - op.sigma * op.form
    h = linalg.solve(system, op.weights * rhs, assume_a="sym")
    residual = float(np.max(np.abs(h - op.sigma * op.apply(h) - rhs)))
    # Roundoff floor of the matrix-vector product itself
    floor = 1024.0 * np.finfo(float).eps * float(np.max(np.abs(op.matrix) @ np.abs(h)))
    if residual > RESIDUAL_LIMIT * scale + floor:
        raise NearSingular(
            f"Residual {residual:.3e} too large for Id - sigma L_{op.n} at Omega={op.omega}",
            {"n": op.n, "omega": op.omega, "condition": cond, "residual": residual},
        )
    logger.debug(f"Solved Id - sigma L_{op.n} (cond={cond:.3e}, residual={residual:.2e})")
    return h
