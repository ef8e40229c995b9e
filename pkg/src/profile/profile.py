"""
Radial Profile

Stationary radial vorticity profile f0 on the unit disc, stored through its
representation in x = r^2 (f0(r) = f~0(r^2)). Provides hypothesis
certification, the constants kappa1/kappa2 and the compatibility fields
mu0 and nu that every downstream module consumes.
"""

import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.polynomial import Chebyshev, Polynomial
from scipy.interpolate import PchipInterpolator, PPoly

from src.errors import (
    BadTable,
    ConfigError,
    ForbiddenOmega,
    NonMonotone,
    SignChange,
    ValidationError,
    WrongRegime,
)
from src.numerics import adaptive_quad, chebyshev_grid

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

POLYNOMIAL = "polynomial"
TABULATED = "tabulated"


def is_c1(interp: PPoly, rtol: float = 1e-8) -> bool:
    """
    True when the piecewise interpolant has a finite, continuous first derivative.

    Compares the derivative at the right end of each piece with its value at
    the left end of the next one.
    """
    deriv = interp.derivative()
    coeffs = deriv.c
    if not np.all(np.isfinite(coeffs)):
        return False
    if coeffs.shape[1] < 2:
        return True
    widths = np.diff(deriv.x)[:-1]
    degree = coeffs.shape[0] - 1
    powers = widths[None, :] ** (degree - np.arange(degree + 1))[:, None]
    right_ends = np.sum(coeffs[:, :-1] * powers, axis=0)
    left_starts = coeffs[-1, 1:]
    scale = max(1.0, float(np.max(np.abs(coeffs[-1]))))
    return bool(np.all(np.abs(right_ends - left_starts) <= rtol * scale))


def _like(values: np.ndarray, r: ArrayLike) -> ArrayLike:
    """Return a float for scalar input, an array otherwise."""
    if np.ndim(r) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class ProfileConstants:
    """Scalar constants derived from a validated profile."""

    kappa1: float
    kappa2: float
    amplitude: float
    f0_at_0: float
    f0_at_1: float
    f0p_at_1: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "amplitude": self.amplitude,
            "f0_at_0": self.f0_at_0,
            "f0_at_1": self.f0_at_1,
            "f0p_at_1": self.f0p_at_1,
        }


@dataclass
class ValidationReport:
    """Outcome of the monotonicity / sign / smoothness checks."""

    grid_size: int
    min_slope_ratio: float
    f0_min: float
    f0_max: float
    sign: Optional[str]
    smooth: Dict[str, bool]
    failures: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.failures

    def raise_for_failure(self) -> None:
        """
        Raise the first recorded failure, if any.

        Raises:
            NonMonotone, SignChange or BadTable matching the failed check
        """
        if not self.failures:
            return
        kinds = {"NonMonotone": NonMonotone, "SignChange": SignChange, "BadTable": BadTable}
        name, message = self.failures[0]
        raise kinds.get(name, ValidationError)(message, self.to_dict())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accepted": self.accepted,
            "grid_size": self.grid_size,
            "min_slope_ratio": self.min_slope_ratio,
            "f0_min": self.f0_min,
            "f0_max": self.f0_max,
            "sign": self.sign,
            "smooth": dict(self.smooth),
            "failures": [{"check": name, "message": msg} for name, msg in self.failures],
        }


@dataclass(frozen=True)
class Profile:
    """
    Radial density f0 given as a polynomial in r^2 or as a table in x = r^2.

    Attributes:
        kind: "polynomial" or "tabulated"
        coeffs: c_k with f0(r) = sum c_k r^(2k) (polynomial kind)
        table_x: ascending samples of x = r^2 covering [0, 1] (tabulated kind)
        table_f: f~0 at ``table_x`` (tabulated kind)
        beta: nominal Holder exponent, metadata only
    """

    kind: str = POLYNOMIAL
    coeffs: Tuple[float, ...] = ()
    table_x: Tuple[float, ...] = ()
    table_f: Tuple[float, ...] = ()
    beta: float = 0.5
    _cache: Dict[str, Any] = field(default_factory=dict, init=False, repr=False, compare=False)

    SMALL_R = 1e-6
    VALIDATION_GRID = 256
    TABLE_MOMENT_DEGREE = 64

    def __post_init__(self):
        if self.kind == POLYNOMIAL:
            if not self.coeffs:
                raise ConfigError("Polynomial profile needs at least one coefficient")
            if not np.all(np.isfinite(self.coeffs)):
                raise ConfigError(f"Non-finite coefficients: {self.coeffs}")
            poly = Polynomial(np.asarray(self.coeffs, dtype=float))
            self._cache["poly"] = poly
            self._cache["dpoly"] = poly.deriv()
        elif self.kind == TABULATED:
            x = np.asarray(self.table_x, dtype=float)
            f = np.asarray(self.table_f, dtype=float)
            if x.ndim != 1 or x.shape != f.shape or len(x) < 4:
                raise BadTable("Table needs matching x and f0 columns with at least 4 rows")
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f))):
                raise BadTable("Table contains non-finite values")
            if np.any(np.diff(x) <= 0):
                raise BadTable("Table samples are not strictly increasing in x")
            if abs(x[0]) > 1e-14 or abs(x[-1] - 1.0) > 1e-14:
                raise BadTable(f"Table must span x in [0, 1], got [{x[0]}, {x[-1]}]")
            interp = PchipInterpolator(x, f)
            self._cache["interp"] = interp
            self._cache["dinterp"] = interp.derivative()
            self._cache["antideriv"] = interp.antiderivative()
        else:
            raise ConfigError(f"Unknown profile kind: {self.kind!r}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigError(f"beta must lie in (0, 1), got {self.beta}")

    # ------------------------------------------------------------------
    # Construction

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], beta: float = 0.5) -> "Profile":
        """Profile f0(r) = sum_k coeffs[k] r^(2k)."""
        return cls(kind=POLYNOMIAL, coeffs=tuple(float(c) for c in coeffs), beta=beta)

    @classmethod
    def tabulated(cls, x: Sequence[float], f: Sequence[float], beta: float = 0.5) -> "Profile":
        """Profile from samples of f~0 on x = r^2 in [0, 1]."""
        return cls(
            kind=TABULATED,
            table_x=tuple(float(v) for v in x),
            table_f=tuple(float(v) for v in f),
            beta=beta,
        )

    @classmethod
    def from_config(cls, config: Dict[str, Any], base_dir: Optional[Path] = None) -> "Profile":
        """
        Build a profile from a parsed config mapping.

        Args:
            config: Mapping with ``kind`` and ``coeffs``, ``table`` or ``table_csv``
            base_dir: Directory that relative ``table_csv`` paths resolve against

        Returns:
            Profile

        Raises:
            ConfigError: If required keys are missing
        """
        kind = str(config.get("kind", POLYNOMIAL)).lower()
        beta = float(config.get("beta", 0.5))
        if kind in ("polynomial", "polynomial-in-r2", "polynomial-in-r²"):
            if "coeffs" not in config:
                raise ConfigError("Polynomial profile config needs 'coeffs'")
            return cls.polynomial(config["coeffs"], beta=beta)
        if kind == TABULATED:
            if "table" in config:
                table = np.asarray(config["table"], dtype=float)
                if table.ndim != 2 or table.shape[1] != 2:
                    raise BadTable("'table' must be a list of [x, f0] pairs")
                return cls.tabulated(table[:, 0], table[:, 1], beta=beta)
            if "table_csv" in config:
                path = Path(config["table_csv"])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                df = pd.read_csv(path)
                missing = {"x", "f0"} - set(df.columns)
                if missing:
                    raise BadTable(f"CSV table missing columns: {sorted(missing)}")
                return cls.tabulated(df["x"].to_numpy(), df["f0"].to_numpy(), beta=beta)
            raise ConfigError("Tabulated profile config needs 'table' or 'table_csv'")
        raise ConfigError(f"Unknown profile kind: {kind!r}")

    def to_config(self) -> Dict[str, Any]:
        if self.kind == POLYNOMIAL:
            return {"kind": POLYNOMIAL, "coeffs": list(self.coeffs), "beta": self.beta}
        return {
            "kind": TABULATED,
            "table": [[x, f] for x, f in zip(self.table_x, self.table_f)],
            "beta": self.beta,
        }

    # ------------------------------------------------------------------
    # Pointwise evaluation

    def f0_tilde(self, x: ArrayLike) -> ArrayLike:
        x_arr = np.asarray(x, dtype=float)
        if self.kind == POLYNOMIAL:
            return _like(self._cache["poly"](x_arr), x)
        return _like(self._cache["interp"](x_arr), x)

    def f0_tilde_prime(self, x: ArrayLike) -> ArrayLike:
        x_arr = np.asarray(x, dtype=float)
        if self.kind == POLYNOMIAL:
            return _like(self._cache["dpoly"](x_arr), x)
        return _like(self._cache["dinterp"](x_arr), x)

    def f0(self, r: ArrayLike) -> ArrayLike:
        r_arr = np.asarray(r, dtype=float)
        return _like(np.asarray(self.f0_tilde(r_arr * r_arr)), r)

    def f0_prime(self, r: ArrayLike) -> ArrayLike:
        r_arr = np.asarray(r, dtype=float)
        return _like(2.0 * r_arr * np.asarray(self.f0_tilde_prime(r_arr * r_arr)), r)

    def slope_ratio(self, r: ArrayLike) -> ArrayLike:
        """f0'(r)/r = 2 f~0'(r^2), with the analytic limit below r = 1e-6."""
        r_arr = np.asarray(r, dtype=float)
        values = 2.0 * np.asarray(self.f0_tilde_prime(r_arr * r_arr))
        limit = 2.0 * float(self.f0_tilde_prime(0.0))
        return _like(np.where(r_arr < self.SMALL_R, limit, values), r)

    def inner_mean(self, r: ArrayLike) -> ArrayLike:
        """
        Averaged profile int_0^1 s f0(r s) ds.

        Equals kappa1 at r = 0 and kappa2 at r = 1; nondecreasing in r for
        increasing profiles.
        """
        r_arr = np.asarray(r, dtype=float)
        x = r_arr * r_arr
        if self.kind == POLYNOMIAL:
            c = np.asarray(self.coeffs, dtype=float)
            k = np.arange(len(c))
            return _like(Polynomial(c / (2 * k + 2))(x), r)
        anti = self._cache["antideriv"]
        safe = np.where(r_arr < self.SMALL_R, 1.0, x)
        values = (anti(safe) - anti(0.0)) / (2.0 * safe)
        return _like(np.where(r_arr < self.SMALL_R, 0.5 * float(self.f0_tilde(0.0)), values), r)

    def scaled_moment(self, k: int, r: ArrayLike) -> ArrayLike:
        """
        S_k(r) = int_0^1 u^(2k+1) f0(r u) du.

        S_k(1) is the moment int_0^1 s^(2k+1) f0(s) ds; S_0 is the inner mean.
        """
        r_arr = np.asarray(r, dtype=float)
        x = r_arr * r_arr
        if self.kind == POLYNOMIAL:
            c = np.asarray(self.coeffs, dtype=float)
            j = np.arange(len(c))
            return _like(Polynomial(c / (2 * k + 2 * j + 2))(x), r)
        return _like(self._table_moment(k)(x), r)

    def moment(self, k: int) -> float:
        """int_0^1 s^(2k+1) f0(s) ds."""
        key = f"moment:{k}"
        if key not in self._cache:
            if self.kind == POLYNOMIAL:
                value = float(self.scaled_moment(k, 1.0))
            else:
                value = 0.5 * adaptive_quad(
                    lambda x: x**k * float(self.f0_tilde(x)), 0.0, 1.0, points=self.table_x
                )
            self._cache[key] = value
        return self._cache[key]

    def slope_moment(self) -> float:
        """int_0^1 s^2 f0'(s) ds = f~0(1) - int_0^1 f~0(x) dx."""
        if self.kind == POLYNOMIAL:
            c = np.asarray(self.coeffs, dtype=float)
            k = np.arange(len(c))
            return float(np.sum(k * c / (k + 1)))
        anti = self._cache["antideriv"]
        return float(self.f0_tilde(1.0)) - float(anti(1.0) - anti(0.0))

    def _table_moment(self, k: int) -> Chebyshev:
        # Chebyshev interpolant in x of S_k, built once per k
        key = f"table_moment:{k}"
        if key not in self._cache:

            def exact(x: np.ndarray) -> np.ndarray:
                return np.array(
                    [
                        0.5 * adaptive_quad(lambda v, xx=xx: v**k * float(self.f0_tilde(xx * v)), 0.0, 1.0)
                        for xx in np.atleast_1d(x)
                    ]
                )

            self._cache[key] = Chebyshev.interpolate(exact, self.TABLE_MOMENT_DEGREE, domain=[0.0, 1.0])
            logger.debug(f"Tabulated S_{k} interpolant built (degree {self.TABLE_MOMENT_DEGREE})")
        return self._cache[key]

    # ------------------------------------------------------------------
    # Constants and hypotheses

    def constants(self) -> ProfileConstants:
        """
        kappa1 = f0(0)/2, kappa2 = int_0^1 s f0(s) ds and the endpoint data.

        Raises:
            QuadratureFailure: If the kappa2 quadrature does not converge
        """
        if "constants" not in self._cache:
            f0_0 = float(self.f0(0.0))
            f0_1 = float(self.f0(1.0))
            consts = ProfileConstants(
                kappa1=0.5 * f0_0,
                kappa2=self.moment(0),
                amplitude=f0_1 / f0_0 if f0_0 != 0 else float("inf"),
                f0_at_0=f0_0,
                f0_at_1=f0_1,
                f0p_at_1=float(self.f0_prime(1.0)),
            )
            self._cache["constants"] = consts
        return self._cache["constants"]

    @property
    def sign(self) -> str:
        """Certified sign of f0 on [0, 1]: "positive" or "negative"."""
        c = self.constants()
        if c.f0_at_0 > 0 and c.f0_at_1 > 0:
            return "positive"
        if c.f0_at_0 < 0 and c.f0_at_1 < 0:
            return "negative"
        raise SignChange(f"f0 changes sign on [0, 1]: f0(0)={c.f0_at_0}, f0(1)={c.f0_at_1}")

    def validate_hypotheses(self, grid_size: int = VALIDATION_GRID) -> ValidationReport:
        """
        Check strict monotonicity (inf f0'(r)/r > 0) and constant sign.

        Args:
            grid_size: Number of Chebyshev validation points, at least 16

        Returns:
            ValidationReport; call ``raise_for_failure()`` to turn a rejection
            into an exception
        """
        if grid_size < 16:
            raise ValueError(f"grid_size must be >= 16, got {grid_size}")
        r = chebyshev_grid(grid_size)
        slope = np.asarray(self.slope_ratio(r))
        values = np.asarray(self.f0(r))
        min_slope = float(np.min(slope))
        f_min, f_max = float(np.min(values)), float(np.max(values))

        failures: List[Tuple[str, str]] = []
        sign: Optional[str] = None
        if f_min > 0:
            sign = "positive"
        elif f_max < 0:
            sign = "negative"
        else:
            failures.append(("SignChange", f"f0 ranges over [{f_min}, {f_max}] and vanishes on [0, 1]"))
        if not min_slope > 0:
            failures.append(("NonMonotone", f"min f0'(r)/r on grid is {min_slope}, must be > 0"))

        smooth = {"finite": bool(np.all(np.isfinite(values)) and np.all(np.isfinite(slope)))}
        if self.kind == TABULATED:
            smooth["strictly_increasing_x"] = bool(np.all(np.diff(np.asarray(self.table_x)) > 0))
            smooth["c1_interpolant"] = is_c1(self._cache["interp"])
            if not smooth["c1_interpolant"]:
                failures.append(("BadTable", "Interpolant derivative jumps at a table node"))
        else:
            smooth["polynomial_in_r2"] = True
        if not smooth["finite"]:
            failures.append(("BadTable", "Profile evaluates to non-finite values"))

        report = ValidationReport(
            grid_size=grid_size,
            min_slope_ratio=min_slope,
            f0_min=f_min,
            f0_max=f_max,
            sign=sign,
            smooth=smooth,
            failures=failures,
        )
        if report.accepted:
            logger.info(f"Profile accepted: sign={sign}, min f0'(r)/r={min_slope:.6g}")
        else:
            logger.warning(f"Profile rejected: {[name for name, _ in failures]}")
        return report

    # ------------------------------------------------------------------
    # Omega-dependent fields

    def sigma(self, omega: float) -> int:
        """-1 in the defocusing regime (Omega < kappa1), +1 when focusing (Omega > kappa2)."""
        c = self.constants()
        if omega < c.kappa1:
            return -1
        if omega > c.kappa2:
            return 1
        raise ForbiddenOmega(
            f"Omega={omega} lies in the forbidden interval [{c.kappa1}, {c.kappa2}]",
            {"omega": omega, "kappa1": c.kappa1, "kappa2": c.kappa2},
        )

    def regime(self, omega: float) -> str:
        return "defocusing" if self.sigma(omega) < 0 else "focusing"

    def mu0(self, omega: float, r: ArrayLike, check: bool = True) -> ArrayLike:
        """
        Compatibility function mu0(r) = (f0'(r)/r) / (Omega - inner_mean(r)).

        Args:
            omega: Angular velocity outside [kappa1, kappa2]
            r: Radius or array of radii in [0, 1]
            check: Reject forbidden Omega; kneser-type callers at Omega = kappa2 pass False

        Raises:
            ForbiddenOmega: If Omega lies in [kappa1, kappa2] and ``check`` is set
        """
        if check:
            self.sigma(omega)
        r_arr = np.asarray(r, dtype=float)
        values = np.asarray(self.slope_ratio(r_arr)) / (omega - np.asarray(self.inner_mean(r_arr)))
        return _like(values, r)

    def nu(self, omega: float, r: ArrayLike) -> ArrayLike:
        """nu(r) = sigma * mu0(r) = |mu0(r)| > 0."""
        sigma = self.sigma(omega)
        return _like(sigma * np.asarray(self.mu0(omega, r, check=False)), r)

    def estimate_c0(self, omega: float, theta: float = 1.0, grid_size: int = VALIDATION_GRID) -> float:
        """
        Empirical constant in nu <= C0 (f0'/r) / ((Omega - kappa2)^theta (1 - r)^(1 - theta)).

        Raises:
            WrongRegime: If Omega is not in the focusing regime
        """
        if not 0.0 < theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {theta}")
        if self.sigma(omega) < 0:
            raise WrongRegime(f"C0 is defined for Omega > kappa2, got Omega={omega}")
        r = chebyshev_grid(grid_size)
        if theta < 1.0:
            r = r[:-1]
        gap = omega - self.constants().kappa2
        ratio = np.asarray(self.nu(omega, r)) * gap**theta * (1.0 - r) ** (1.0 - theta)
        c0 = float(np.max(ratio / np.asarray(self.slope_ratio(r))))
        logger.debug(f"Empirical C0(theta={theta}) at Omega={omega}: {c0:.6g}")
        return c0


def load_profile(path: Union[str, Path]) -> Profile:
    """
    Load a profile from a JSON or TOML config file.

    Args:
        path: Config file path

    Returns:
        Profile

    Raises:
        ConfigError: If the file cannot be parsed
        OSError: If the file cannot be read
    """
    path = Path(path)
    logger.info(f"Loading profile from {path}...")
    try:
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as f:
                config = tomllib.load(f)
        else:
            with open(path) as f:
                config = json.load(f)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        logger.error(f"Could not parse profile config {path}: {e}")
        raise ConfigError(f"Could not parse profile config {path}: {e}")
    return Profile.from_config(config, base_dir=path.parent)
