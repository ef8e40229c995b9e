"""
Mode Coefficients

Singular set Omega_hat_n and the pieces G_n, H_n, A_n of the mode-n linearized
operator around a radial profile.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Union

import numpy as np

from src.errors import SingularOmega
from src.numerics import adaptive_quad
from src.profile import Profile

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
RadialFunction = Callable[[float], float]

SINGULAR_THRESHOLD = 1e-12


@dataclass(frozen=True)
class ModeCoefficients:
    """Omega_hat_n and, for a given Omega, the boundary gap G_n(1) = n(Omega - Omega_hat_n)."""

    n: int
    omega_hat: float
    boundary_gap: float


def _check_mode(n: int) -> None:
    if n < 1:
        raise ValueError(f"Mode index must be >= 1, got {n}")


def omega_hat(p: Profile, n: int) -> float:
    """
    Singular value Omega_hat_n = kappa2 - ((n+1)/n) int_0^1 s^(2n+1) f0 ds.

    Tends to kappa2 like kappa2 - f0(1)/(2n).
    """
    _check_mode(n)
    return p.constants().kappa2 - (n + 1) / n * p.moment(n)


def singular_set(p: Profile, m: int, n_max: int) -> List[float]:
    """
    Omega_hat over the multiples m, 2m, ..., n_max*m, followed by the limit kappa2.

    Args:
        p: Validated profile
        m: Base symmetry
        n_max: Number of multiples

    Returns:
        Ordered list ending with kappa2
    """
    _check_mode(m)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    values = [omega_hat(p, k * m) for k in range(1, n_max + 1)]
    values.append(p.constants().kappa2)
    return values


def mode_coefficients(p: Profile, n: int, omega: float) -> ModeCoefficients:
    oh = omega_hat(p, n)
    return ModeCoefficients(n=n, omega_hat=oh, boundary_gap=n * (omega - oh))


def G_n_scaled(p: Profile, omega: float, n: int, r: ArrayLike) -> ArrayLike:
    """
    r^(1-n) G_n(r) = n Omega r^2 + kappa2 - (n+1) r^2 S_0(r) + (n+1) r^2 S_n(r).

    Finite down to r = 0, where it equals kappa2.
    """
    _check_mode(n)
    r_arr = np.asarray(r, dtype=float)
    r2 = r_arr * r_arr
    kappa2 = p.constants().kappa2
    values = (
        n * omega * r2
        + kappa2
        - (n + 1) * r2 * np.asarray(p.scaled_moment(0, r_arr))
        + (n + 1) * r2 * np.asarray(p.scaled_moment(n, r_arr))
    )
    return float(values) if np.ndim(r) == 0 else values


def G_n(p: Profile, omega: float, n: int, r: ArrayLike) -> ArrayLike:
    """
    G_n(r) = n Omega r^(n+1) + r^(n-1) [kappa2 - (n+1) int_0^r s f0 ds] + (n+1) r^(-n-1) int_0^r s^(2n+1) f0 ds.

    At r = 1 this is n (Omega - Omega_hat_n).
    """
    r_arr = np.asarray(r, dtype=float)
    values = r_arr ** (n - 1) * np.asarray(G_n_scaled(p, omega, n, r_arr))
    return float(values) if np.ndim(r) == 0 else values


def H_n(h: RadialFunction, n: int, r: ArrayLike) -> ArrayLike:
    """
    H_n[h](r) = r^(2n) int_r^1 s^(1-n) h ds + int_0^r s^(n+1) h ds.

    The first piece is integrated with the bounded weight (r/s)^n s, so large
    n does not amplify the s^(1-n) factor.

    Args:
        h: Radial function, callable on floats
        n: Mode index >= 1
        r: Radius or array of radii in [0, 1]

    Returns:
        H_n[h](r)
    """
    _check_mode(n)

    def single(rr: float) -> float:
        outer = 0.0
        if rr < 1.0:
            outer = rr**n * adaptive_quad(lambda s: (rr / s) ** n * s * float(h(s)), rr, 1.0)
        inner = adaptive_quad(lambda s: s ** (n + 1) * float(h(s)), 0.0, rr) if rr > 0 else 0.0
        return outer + inner

    if np.ndim(r) == 0:
        return single(float(r))
    return np.array([single(float(rr)) for rr in np.asarray(r, dtype=float)])


def A_n(p: Profile, omega: float, n: int, h: RadialFunction) -> float:
    """
    Boundary coefficient A_n[h] = int_0^1 s^(n+1) h ds / (2n (Omega_hat_n - Omega)).

    Cross-checked against -H_n[h](1) / (2 G_n(1)).

    Raises:
        SingularOmega: If Omega is within the singular threshold of Omega_hat_n
    """
    oh = omega_hat(p, n)
    scale = max(1.0, abs(p.constants().kappa2))
    if abs(omega - oh) < SINGULAR_THRESHOLD * scale:
        raise SingularOmega(
            f"Omega={omega} coincides with Omega_hat_{n}={oh}",
            {"omega": omega, "n": n, "omega_hat": oh},
        )
    boundary_moment = float(H_n(h, n, 1.0))
    direct = boundary_moment / (2 * n * (oh - omega))
    via_g = -boundary_moment / (2.0 * float(G_n(p, omega, n, 1.0)))
    if abs(direct - via_g) > 1e-10 * max(1.0, abs(direct)):
        logger.warning(f"A_{n} forms disagree: {direct} vs {via_g}")
    return direct


def linearized_operator(p: Profile, omega: float, n: int, h: RadialFunction, r: ArrayLike) -> ArrayLike:
    """
    Mode-n linearized operator applied to a radial function.

    For n >= 1: h/mu0 - (r/n) [G_n(r) A_n[h] + H_n[h](r) / (2 r^(n+1))].
    For n = 0: h/mu0 - int_r^1 (1/tau) int_0^tau s h ds dtau.

    Args:
        p: Validated profile
        omega: Angular velocity outside [kappa1, kappa2] and off the singular set
        n: Mode index >= 0
        h: Radial function, callable on floats
        r: Radius or array of radii in (0, 1]
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("linearized_operator is evaluated on (0, 1]")
    h_vals = np.array([float(h(rr)) for rr in r_arr])
    local = h_vals / np.asarray(p.mu0(omega, r_arr))

    if n == 0:
        def mass(tau: float) -> float:
            return adaptive_quad(lambda s: s * float(h(s)), 0.0, tau) / tau if tau > 0 else 0.0

        nonlocal_part = np.array([adaptive_quad(mass, rr, 1.0) for rr in r_arr])
    else:
        a = A_n(p, omega, n, h)
        g = np.asarray(G_n(p, omega, n, r_arr))
        hn = np.asarray(H_n(h, n, r_arr))
        nonlocal_part = (r_arr / n) * (g * a + hn / (2.0 * r_arr ** (n + 1)))

    values = local - nonlocal_part
    return float(values[0]) if np.ndim(r) == 0 else values
