"""
Dispersion Function

zeta_n(Omega) = F(1) (Omega - n kappa2/(n+1)) + int_0^1 F s^(2n+1) (f0 - 2 Omega) ds

vanishes exactly when the mode-n linearized operator has a kernel. This module
evaluates zeta_n, brackets and refines its roots in both regimes, certifies
that the kernel at a root is one-dimensional and cross-checks the operator
form 1 - T(n, Omega).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from src.errors import (
    CertificateFailed,
    NearSingular,
    NoSignChange,
    NotAdmissible,
    SingularOmega,
    TailNotConverged,
    WrongRegime,
)
from src.modes import G_n, omega_hat, singular_set
from src.numerics import parallel_map
from src.operator_lab import discretize, solve_id_minus_L
from src.profile import Profile
from src.sturm import GeneratorSolution, mode0_exceptional_set, prufer_trace, solve_generator

logger = logging.getLogger(__name__)

ZETA_GRID = 65
GUARD = 1e-8
DEFAULT_ALPHA = 1.5
ABUNDANCE_STEP = 10
MODE0_TOL = 1e-3
MODE0_PROBE = 1e-3


@dataclass(frozen=True)
class DispersionRoot:
    omega: float
    residual: float
    bracket: Tuple[float, float]
    tol: float


@dataclass(frozen=True, eq=False)
class DispersionScan:
    """Samples of zeta_n over a window with bracketed, refined roots."""

    n: int
    regime: str
    window: Tuple[float, float]
    omega_samples: np.ndarray
    zeta_values: np.ndarray
    brackets: List[Tuple[float, float]]
    roots: List[DispersionRoot]
    lipschitz: float
    status: str = "bracketed"

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"kind": "sample", "n": self.n, "omega": w, "zeta": z, "lo": np.nan, "hi": np.nan}
            for w, z in zip(self.omega_samples, self.zeta_values)
        ]
        rows += [
            {"kind": "root", "n": self.n, "omega": r.omega, "zeta": r.residual, "lo": r.bracket[0], "hi": r.bracket[1]}
            for r in self.roots
        ]
        return pd.DataFrame(rows, columns=["kind", "n", "omega", "zeta", "lo", "hi"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "regime": self.regime,
            "window": list(self.window),
            "status": self.status,
            "omega_samples": [float(w) for w in self.omega_samples],
            "zeta_values": [float(z) for z in self.zeta_values],
            "brackets": [list(b) for b in self.brackets],
            "roots": [
                {"omega": r.omega, "residual": r.residual, "bracket": list(r.bracket), "tol": r.tol}
                for r in self.roots
            ],
            "lipschitz": self.lipschitz,
        }


@dataclass(frozen=True)
class EigenvalueCertificate:
    """Evidence that Omega_m is an eigenvalue with a one-dimensional kernel."""

    m: int
    omega_m: float
    regime: str
    zeta_residual: float
    higher_mode_margins: List[Tuple[int, float]]
    higher_mode_values: List[Tuple[int, float]]
    singular_set_distance: float
    mode0_distance: float
    kernel_dimension: int
    tol: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "omega_m": self.omega_m,
            "regime": self.regime,
            "zeta_residual": self.zeta_residual,
            "higher_mode_margins": [[n, v] for n, v in self.higher_mode_margins],
            "higher_mode_values": [[n, v] for n, v in self.higher_mode_values],
            "singular_set_distance": self.singular_set_distance,
            "mode0_distance": self.mode0_distance,
            "kernel_dimension": self.kernel_dimension,
            "tol": self.tol,
        }


def zeta_with_generator(
    p: Profile, omega: float, n: int, tol: float = 1e-10, grid_size: int = ZETA_GRID
) -> Tuple[float, GeneratorSolution]:
    """zeta_n(Omega) together with the generator solve it came from."""
    power = 2 * n + 1

    def moment(r: float, F: float, Fp: float) -> float:
        return r**power * (float(p.f0(r)) - 2.0 * omega) * F

    sol = solve_generator(p, omega, n, tol=tol, grid_size=grid_size, integrands={"moment": moment})
    kappa2 = p.constants().kappa2
    value = sol.F_at_1 * (omega - n * kappa2 / (n + 1)) + sol.integrals["moment"]
    return value, sol


def zeta(p: Profile, omega: float, n: int, tol: float = 1e-10) -> float:
    """
    Dispersion function zeta_n(Omega).

    Raises:
        ForbiddenOmega: If Omega lies in [kappa1, kappa2]
        ToleranceNotMet: If the generator solve misses tol
    """
    value, _ = zeta_with_generator(p, omega, n, tol=tol)
    return value


def _lipschitz(omegas: np.ndarray, values: np.ndarray) -> float:
    if len(omegas) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(values) / np.diff(omegas))))


def _guarded_samples(p: Profile, n: int, lo: float, hi: float, samples: int) -> np.ndarray:
    # Drop samples inside the forbidden interval or near any Omega_hat_{kn}
    c = p.constants()
    omegas = np.linspace(lo, hi, samples)
    keep = ~((omegas >= c.kappa1) & (omegas <= c.kappa2))
    first = omega_hat(p, n)
    if hi < min(first, c.kappa2) - GUARD or lo > max(first, c.kappa2) + GUARD:
        return omegas[keep]
    k = 1
    while True:
        oh = omega_hat(p, k * n)
        keep &= np.abs(omegas - oh) > GUARD
        if abs(oh - c.kappa2) < GUARD or k > 4096:
            break
        # Omega_hat_{kn} is monotone toward kappa2; stop once it leaves the window for good
        if (c.f0_at_0 > 0 and oh > hi) or (c.f0_at_0 < 0 and oh < lo):
            break
        k += 1
    return omegas[keep]


def scan_window(
    p: Profile,
    n: int,
    window: Tuple[float, float],
    samples: int = 9,
    tol: float = 1e-10,
    threads: int = 1,
    regime: Optional[str] = None,
) -> DispersionScan:
    """
    Sample zeta_n on a window, bracket every sign change and refine it.

    Args:
        p: Validated profile
        n: Mode index
        window: (lo, hi)
        samples: Number of equispaced samples before guarding
        tol: Generator tolerance; also the root tolerance
        threads: Worker cap for the sample sweep

    Returns:
        DispersionScan; status "no_sign_change" when nothing was bracketed
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError(f"Empty window ({lo}, {hi})")
    omegas = _guarded_samples(p, n, lo, hi, samples)
    if len(omegas) < 2:
        raise ValueError(f"Window ({lo}, {hi}) leaves fewer than two admissible samples")
    values = np.array(parallel_map(lambda w: zeta(p, float(w), n, tol), omegas, threads))

    brackets: List[Tuple[float, float]] = []
    roots: List[DispersionRoot] = []
    xtol = min(1e-10 * (hi - lo), 0.1 * tol)
    for a, b, za, zb in zip(omegas[:-1], omegas[1:], values[:-1], values[1:]):
        if za == 0.0:
            roots.append(DispersionRoot(float(a), 0.0, (float(a), float(a)), tol))
            continue
        if za * zb > 0:
            continue
        brackets.append((float(a), float(b)))
        # brentq keeps the sign change bracketed at every step
        root = brentq(lambda w: zeta(p, w, n, tol), a, b, xtol=xtol)
        residual = abs(zeta(p, root, n, tol))
        if residual > tol:
            logger.warning(f"Root {root} of zeta_{n} has residual {residual:.2e} > tol {tol:.1e}")
        roots.append(DispersionRoot(float(root), float(residual), (float(a), float(b)), tol))
        logger.info(f"zeta_{n} root at Omega={root:.12f} (|zeta|={residual:.2e})")

    status = "bracketed" if roots else "no_sign_change"
    if not roots:
        logger.warning(f"No sign change of zeta_{n} on ({lo}, {hi})")
    return DispersionScan(
        n=n,
        regime=regime or p.regime(float(omegas[0])),
        window=(lo, hi),
        omega_samples=omegas,
        zeta_values=values,
        brackets=brackets,
        roots=roots,
        lipschitz=_lipschitz(omegas, values),
        status=status,
    )


def scarcity_bound(p: Profile) -> float:
    """Largest admissible symmetry f0(0) / (10 (f0(1) - f0(0))) for positive profiles."""
    c = p.constants()
    return c.f0_at_0 / (10.0 * (c.f0_at_1 - c.f0_at_0))


def scarcity_window(p: Profile, m: int) -> Tuple[float, float]:
    """(Omega_hat_m, m kappa2/(m+1)) shrunk by the guard band."""
    c = p.constants()
    hi = min(m * c.kappa2 / (m + 1), c.kappa1 - GUARD)
    return omega_hat(p, m) + GUARD, hi


def scan_scarcity(p: Profile, m: int, tol: float = 1e-10, samples: int = 9, threads: int = 1) -> DispersionScan:
    """
    Bracket zeta_m roots in (Omega_hat_m, m kappa2/(m+1)) for a positive profile.

    Raises:
        WrongRegime: If f0 is negative
        NotAdmissible: If m lies outside [3, f0(0)/(10 (f0(1) - f0(0)))]
    """
    if p.sign != "positive":
        raise WrongRegime("Scarcity scans need a positive profile")
    bound = scarcity_bound(p)
    if not 3 <= m <= bound:
        raise NotAdmissible(
            f"m={m} outside the admissible range [3, {bound:.6g}]", {"m": m, "bound": bound}
        )
    window = scarcity_window(p, m)
    logger.info(f"Scarcity scan m={m} on ({window[0]:.10g}, {window[1]:.10g})")
    return scan_window(p, m, window, samples=samples, tol=tol, threads=threads, regime="defocusing")


def abundance_window(p: Profile, m: int, alpha: float = DEFAULT_ALPHA) -> Tuple[float, float]:
    """(Omega_hat_m - m^-alpha, Omega_hat_m) shrunk by the guard band."""
    oh = omega_hat(p, m)
    return oh - m ** (-alpha), oh - GUARD


def scan_abundance(
    p: Profile,
    m: int,
    alpha: float = DEFAULT_ALPHA,
    tol: float = 1e-10,
    samples: int = 5,
    threads: int = 1,
    retry: bool = False,
    max_m: Optional[int] = None,
) -> DispersionScan:
    """
    Bracket the zeta_m root in (Omega_hat_m - m^-alpha, Omega_hat_m) for a negative profile.

    Args:
        p: Validated negative profile
        m: Symmetry
        alpha: Window exponent in (1, 2)
        tol: Generator and root tolerance
        samples: Number of samples across the window
        threads: Worker cap
        retry: On NoSignChange, retry at m + 10 until ``max_m``
        max_m: Cap for the retry search (default m + 100)

    Raises:
        WrongRegime: If f0 is positive
        NotAdmissible: If the window reaches down to kappa2
        NoSignChange: If no sign change is found (after retries, when enabled)
    """
    if p.sign != "negative":
        raise WrongRegime("Abundance scans need a negative profile")
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")
    cap = max_m if max_m is not None else m + 10 * ABUNDANCE_STEP
    kappa2 = p.constants().kappa2

    current = m
    while True:
        lo, hi = abundance_window(p, current, alpha)
        if lo <= kappa2:
            raise NotAdmissible(
                f"Abundance window for m={current} reaches kappa2={kappa2}", {"m": current, "lo": lo}
            )
        scan = scan_window(p, current, (lo, hi), samples=samples, tol=tol, threads=threads, regime="focusing")
        if scan.roots:
            return scan
        details = {
            "m": current,
            "window": [lo, hi],
            "zeta_lo": float(scan.zeta_values[0]),
            "zeta_hi": float(scan.zeta_values[-1]),
        }
        if not retry or current + ABUNDANCE_STEP > cap:
            raise NoSignChange(f"zeta_{current} keeps one sign on ({lo}, {hi})", details)
        logger.info(f"No sign change at m={current}; retrying at m={current + ABUNDANCE_STEP}")
        current += ABUNDANCE_STEP


def find_abundance_root(
    p: Profile,
    m: int,
    alpha: float = DEFAULT_ALPHA,
    tol: float = 1e-10,
    max_m: Optional[int] = None,
    threads: int = 1,
) -> Tuple[int, DispersionRoot]:
    """
    First abundance root at m, m + 10, ... up to max_m.

    Returns:
        (symmetry the root was found at, refined root)

    Raises:
        NoSignChange: If every window up to max_m keeps one sign
    """
    scan = scan_abundance(p, m, alpha=alpha, tol=tol, threads=threads, retry=True, max_m=max_m)
    return scan.n, scan.roots[0]


def T_value(
    p: Profile,
    omega: float,
    n: int,
    tol: float = 1e-10,
    method: str = "generator",
    N: int = 256,
) -> float:
    """
    T(n, Omega) = (-sigma / (2n G_n(1))) int_0^1 s^(n+1) (Id - sigma L_n)^-1 [nu r G_n] ds.

    ``method="generator"`` uses the closed reduction
    1 - T = 2n(n+1) zeta_n / ((2n F(1) + F'(1)) G_n(1)); ``method="nystrom"``
    solves the discretized operator equation directly.

    Raises:
        SingularOmega: If Omega sits on Omega_hat_n
        NearSingular: If the reduction or the operator solve degenerates
    """
    boundary = float(G_n(p, omega, n, 1.0))
    scale = max(1.0, abs(p.constants().kappa2))
    if abs(boundary) < 1e-12 * n * scale:
        raise SingularOmega(f"G_{n}(1) vanishes at Omega={omega}", {"omega": omega, "n": n})

    if method == "generator":
        value, sol = zeta_with_generator(p, omega, n, tol=tol)
        denom = (2 * n * sol.F_at_1 + sol.Fprime_at_1) * boundary
        if denom == 0.0:
            raise NearSingular(f"T reduction degenerates at Omega={omega}, n={n}")
        return 1.0 - 2 * n * (n + 1) * value / denom
    if method == "nystrom":
        op = discretize(p, omega, n, N)
        s = op.nodes
        rhs = np.asarray(p.nu(omega, s)) * s * np.asarray(G_n(p, omega, n, s))
        h = solve_id_minus_L(op, rhs)
        integral = float(np.sum(op.quad_weights * s ** (n + 1) * h))
        return -op.sigma * integral / (2 * n * boundary)
    raise ValueError(f"Unknown T method: {method!r}")


def _mode0_distance(p: Profile, omega_m: float) -> float:
    c = p.constants()
    if omega_m < c.kappa1:
        # The exceptional set lives in (kappa2, inf)
        return c.kappa2 - omega_m
    delta = min(MODE0_PROBE, 0.5 * (omega_m - c.kappa2))
    lo, hi = omega_m - delta, omega_m + delta
    theta_lo = prufer_trace(p, lo, tol=MODE0_TOL).theta_bar
    theta_hi = prufer_trace(p, hi, tol=MODE0_TOL).theta_bar
    low, high = theta_hi - MODE0_TOL, theta_lo + MODE0_TOL
    if math.floor(high / math.pi) < math.ceil(low / math.pi):
        return delta
    crossings = mode0_exceptional_set(p, (lo, hi), grid=8, tol=MODE0_TOL * 1e-2)
    if not crossings:
        return delta
    return min(abs(omega_m - s) for s in crossings)


def certify(
    p: Profile,
    m: int,
    omega_m: float,
    N: int = 8,
    tol: float = 1e-10,
    threads: int = 1,
) -> EigenvalueCertificate:
    """
    Certify that Omega_m is a simple eigenvalue of the mode-m problem.

    Checks the root residual, |zeta_{nm}(Omega_m)| > 10 tol for n = 2..N,
    the distance to the singular set and the distance to the mode-zero
    exceptional set.

    Raises:
        CertificateFailed: Naming the offending check
    """
    residual = abs(zeta(p, omega_m, m, tol))
    if residual > tol:
        raise CertificateFailed(
            f"|zeta_{m}(Omega_m)| = {residual:.3e} exceeds tol {tol:.1e}",
            {"check": "root_residual", "m": m, "omega_m": omega_m, "residual": residual},
        )

    indices = list(range(2, N + 1))
    values = parallel_map(lambda k: zeta(p, omega_m, k * m, tol), indices, threads)
    higher_values = [(k, float(v)) for k, v in zip(indices, values)]
    margins = [(k, abs(v)) for k, v in higher_values]
    for k, margin in margins:
        if margin <= 10 * tol:
            raise CertificateFailed(
                f"Mode {k * m} also vanishes at Omega_m={omega_m}: |zeta| = {margin:.3e}",
                {"check": "higher_mode", "mode": k * m, "margin": margin},
            )

    singular = singular_set(p, m, max(N, 1))
    singular_distance = min(abs(omega_m - s) for s in singular)
    if singular_distance <= GUARD:
        raise CertificateFailed(
            f"Omega_m={omega_m} within {singular_distance:.2e} of the singular set",
            {"check": "singular_set", "distance": singular_distance},
        )

    try:
        mode0 = _mode0_distance(p, omega_m)
    except TailNotConverged as e:
        raise CertificateFailed(
            f"Mode-zero check inconclusive at Omega_m={omega_m}: {e.message}",
            {"check": "mode0", **e.details},
        )
    if mode0 <= 0:
        raise CertificateFailed(
            f"Omega_m={omega_m} lies on the mode-zero exceptional set", {"check": "mode0"}
        )

    certificate = EigenvalueCertificate(
        m=m,
        omega_m=omega_m,
        regime=p.regime(omega_m),
        zeta_residual=residual,
        higher_mode_margins=margins,
        higher_mode_values=higher_values,
        singular_set_distance=singular_distance,
        mode0_distance=mode0,
        kernel_dimension=1 + sum(1 for _, v in margins if v <= tol),
        tol=tol,
    )
    logger.info(f"Certified Omega_{m}={omega_m:.12f} (min margin {min([v for _, v in margins], default=float('nan')):.3e})")
    return certificate


def kernel_dimension(p: Profile, m: int, omega_m: float, N: int = 8, tol: float = 1e-10) -> int:
    """Number of n in 1..N with |zeta_{nm}(Omega_m)| <= tol."""
    return sum(1 for k in range(1, N + 1) if abs(zeta(p, omega_m, k * m, tol)) <= tol)
