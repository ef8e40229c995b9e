"""
Command Line Interface

Batch front door: load a profile config, run one analysis and write the
result as CSV or JSON. Exit codes: 0 ok, 2 validation failure, 3 numeric
failure, 4 I/O failure. Failures print a JSON diagnostic on stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src import __version__
from src.analysis import ABUNDANCE, REGIMES, SCARCITY, find_eigenvalues
from src.config import Settings
from src.dispersion import certify, scan_abundance, scan_scarcity, scan_window
from src.errors import ForbiddenOmega, NoSignChange, VortexSpectraError
from src.kernel import kernel_generator, transversality, transversality_profile, verify_kernel_ode
from src.modes import singular_set
from src.operator_lab import (
    condition_number,
    discretize,
    hilbert_schmidt_norm,
    operator_norm,
    smallest_eigenvalue,
    spectrum,
)
from src.profile import Profile, load_profile
from src.storage import ResultWriter, config_hash, emit
from src.sturm import mode0_exceptional_set

logger = logging.getLogger(__name__)

COMMANDS = (
    "analyze",
    "scan-dispersion",
    "find-eigenvalues",
    "certify",
    "kernel",
    "transversality",
    "operator-spectrum",
    "mode0",
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, fully resolved."""

    profile: str
    command: str
    tol: float = 1e-10
    grid: int = 512
    window: Optional[Tuple[float, float]] = None
    m: Tuple[int, ...] = (3,)
    n: int = 1
    n_max: int = 8
    alpha: float = 1.5
    regime: Optional[str] = None
    omega: Optional[float] = None
    format: str = "json"
    out: Optional[str] = None
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command: {self.command!r}")
        if self.tol <= 0:
            raise ValueError(f"--tol must be positive, got {self.tol}")
        if self.grid < 16:
            raise ValueError(f"--grid must be >= 16, got {self.grid}")
        if not self.m or any(m < 1 for m in self.m):
            raise ValueError(f"--m must be positive, got {self.m}")
        if self.n < 0 or self.n_max < 1:
            raise ValueError(f"--n must be >= 0 and --n-max >= 1, got {self.n}, {self.n_max}")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ValueError(f"--window must satisfy LO < HI, got {self.window}")
        if self.regime is not None and self.regime not in REGIMES:
            raise ValueError(f"--regime must be one of {REGIMES}, got {self.regime!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"--format must be csv or json, got {self.format!r}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")

    def hash_with(self, p: Profile) -> str:
        """Config hash over the numeric options and the profile content; output location excluded."""
        payload = {k: v for k, v in asdict(self).items() if k not in ("out", "profile", "threads")}
        payload["profile"] = p.to_config()
        return config_hash(payload)


@dataclass
class CommandResult:
    result: Any
    frame: Optional[pd.DataFrame] = None
    exit_code: int = 0


def _regime_for(p: Profile, config: RunConfig) -> str:
    if config.regime is not None:
        return config.regime
    return SCARCITY if p.sign == "positive" else ABUNDANCE


def _check_window(p: Profile, window: Tuple[float, float]) -> None:
    c = p.constants()
    lo, hi = window
    if hi >= c.kappa1 and lo <= c.kappa2:
        raise ForbiddenOmega(
            f"Window ({lo}, {hi}) meets the forbidden interval [{c.kappa1}, {c.kappa2}]",
            {"window": [lo, hi], "kappa1": c.kappa1, "kappa2": c.kappa2},
        )


def _resolve_omega(p: Profile, config: RunConfig) -> float:
    """Use --omega when given, otherwise locate the root for the first --m."""
    if config.omega is not None:
        return config.omega
    m = config.m[0]
    if _regime_for(p, config) == SCARCITY:
        scan = scan_scarcity(p, m, tol=config.tol, threads=config.threads)
    else:
        scan = scan_abundance(p, m, alpha=config.alpha, tol=config.tol, threads=config.threads)
    if not scan.roots:
        raise NoSignChange(f"No root of zeta_{m} to analyze", {"m": m, "window": list(scan.window)})
    return scan.roots[0].omega


def _analyze(p: Profile, config: RunConfig) -> CommandResult:
    report = p.validate_hypotheses(grid_size=max(config.grid, 16))
    constants = p.constants()
    sign = report.sign
    singular = {m: singular_set(p, m, config.n_max) for m in config.m}
    result: Dict[str, Any] = {
        "profile": p.to_config(),
        "constants": constants.to_dict(),
        "sign": sign,
        "validation": report.to_dict(),
        "singular_set": {str(m): values for m, values in singular.items()},
    }
    # One row per (n, Omega_hat_n); the trailing kappa2 limit is already a column
    rows = [
        {"m": m, "n": k * m, "omega_hat": value, **constants.to_dict(), "sign": sign, "accepted": report.accepted}
        for m, values in singular.items()
        for k, value in enumerate(values[:-1], start=1)
    ]
    # The report is still written when the profile is rejected
    return CommandResult(result, pd.DataFrame(rows), 0 if report.accepted else EXIT_VALIDATION)


def _scan_dispersion(p: Profile, config: RunConfig) -> CommandResult:
    scans = []
    for m in config.m:
        if config.window is not None:
            _check_window(p, config.window)
            scan = scan_window(p, m, config.window, tol=config.tol, threads=config.threads)
        elif _regime_for(p, config) == SCARCITY:
            scan = scan_scarcity(p, m, tol=config.tol, threads=config.threads)
        else:
            scan = scan_abundance(p, m, alpha=config.alpha, tol=config.tol, threads=config.threads)
        scans.append(scan)
    frame = pd.concat([s.to_frame() for s in scans], ignore_index=True)
    return CommandResult([s.to_dict() for s in scans], frame)


def _find_eigenvalues(p: Profile, config: RunConfig) -> CommandResult:
    frame = find_eigenvalues(
        p,
        config.m,
        _regime_for(p, config),
        alpha=config.alpha,
        tol=config.tol,
        threads=config.threads,
    )
    return CommandResult(frame.to_dict(orient="records"), frame)


def _certify(p: Profile, config: RunConfig) -> CommandResult:
    omega = _resolve_omega(p, config)
    cert = certify(p, config.m[0], omega, N=config.n_max, tol=config.tol, threads=config.threads)
    return CommandResult(cert.to_dict(), pd.DataFrame([{k: v for k, v in cert.to_dict().items() if np.isscalar(v)}]))


def _kernel(p: Profile, config: RunConfig) -> CommandResult:
    m = config.m[0]
    omega = _resolve_omega(p, config)
    kg = kernel_generator(p, m, omega, tol=config.tol, grid_size=config.grid)
    result = kg.to_dict()
    result["ode_check"] = verify_kernel_ode(p, m, omega, kg)
    return CommandResult(result, kg.to_frame())


def _transversality(p: Profile, config: RunConfig) -> CommandResult:
    m = config.m[0]
    omega = _resolve_omega(p, config)
    report = transversality(p, m, omega, tol=config.tol)
    frame = transversality_profile(p, m, omega, grid_size=min(config.grid, 257), tol=config.tol)
    return CommandResult(report.to_dict(), frame)


def _operator_spectrum(p: Profile, config: RunConfig) -> CommandResult:
    if config.omega is None:
        raise ValueError("operator-spectrum needs --omega")
    op = discretize(p, config.omega, config.n, config.grid)
    leading = spectrum(op, k=10)
    result = {
        "n": config.n,
        "omega": config.omega,
        "N": config.grid,
        "leading_eigenvalues": leading,
        "smallest_eigenvalue": smallest_eigenvalue(op),
        "operator_norm": operator_norm(op),
        "hilbert_schmidt_norm": hilbert_schmidt_norm(op),
        "condition_number": condition_number(op),
    }
    frame = pd.DataFrame(
        {
            "n": config.n,
            "omega": config.omega,
            "N": config.grid,
            "index": np.arange(len(leading)),
            "eigenvalue": leading,
        }
    )
    return CommandResult(result, frame)


def _mode0(p: Profile, config: RunConfig) -> CommandResult:
    if config.window is None:
        raise ValueError("mode0 needs --window")
    lo, hi = config.window
    kappa2 = p.constants().kappa2
    # Only (kappa2, inf) can hold exceptional values
    lo = max(lo, kappa2 + 1e-6)
    if lo >= hi:
        return CommandResult({"window": list(config.window), "exceptional": []}, pd.DataFrame({"omega": []}))
    found = mode0_exceptional_set(p, (lo, hi), grid=config.grid, threads=config.threads)
    return CommandResult({"window": [lo, hi], "exceptional": found}, pd.DataFrame({"omega": found}))


HANDLERS: Dict[str, Callable[[Profile, RunConfig], CommandResult]] = {
    "analyze": _analyze,
    "scan-dispersion": _scan_dispersion,
    "find-eigenvalues": _find_eigenvalues,
    "certify": _certify,
    "kernel": _kernel,
    "transversality": _transversality,
    "operator-spectrum": _operator_spectrum,
    "mode0": _mode0,
}


def run(config: RunConfig, stream=None) -> int:
    """
    Execute one command and write its artifact.

    Args:
        config: Resolved run configuration
        stream: Where results go when ``config.out`` is unset (default stdout)

    Returns:
        Process exit code
    """
    stream = stream or sys.stdout
    try:
        p = load_profile(config.profile)
        if config.command != "analyze":
            p.validate_hypotheses().raise_for_failure()
        outcome = HANDLERS[config.command](p, config)
        writer = ResultWriter(config.command, config.hash_with(p))
        text = emit(writer, outcome.result, config.format, config.out, outcome.frame)
        if config.out is None:
            stream.write(text)
        return outcome.exit_code
    except VortexSpectraError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return _diagnose(e.to_dict(), e.exit_code)
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return _diagnose({"error": "ValueError", "message": str(e), "exit_code": EXIT_VALIDATION}, EXIT_VALIDATION)
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return _diagnose({"error": type(e).__name__, "message": str(e), "exit_code": EXIT_IO}, EXIT_IO)


def _diagnose(payload: Dict[str, Any], code: int) -> int:
    print(json.dumps(payload, sort_keys=True, default=str), file=sys.stderr)
    return code


def parse_window(tokens: Sequence[str]) -> Tuple[float, float]:
    """Accept ``LO:HI`` or two numbers."""
    if len(tokens) == 1 and ":" in tokens[0]:
        lo, hi = tokens[0].split(":", 1)
    elif len(tokens) == 2:
        lo, hi = tokens
    else:
        raise ValueError(f"--window expects LO:HI or two numbers, got {' '.join(tokens)!r}")
    return float(lo), float(hi)


def parse_modes(text: str) -> Tuple[int, ...]:
    """Accept ``3``, ``3,5,7`` or an inclusive range ``3:6``."""
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":", 1))
        return tuple(range(lo, hi + 1))
    return tuple(int(v) for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortex-spectra",
        description="Bifurcation analysis of radial vortices in the 2D Euler equations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("profile", help="Profile config (.toml or .json)")
        cmd.add_argument("--tol", type=float, default=None, help="Root and solver tolerance")
        cmd.add_argument("--grid", type=int, default=None, help="Grid size, Nystrom order or mode0 Omega samples")
        cmd.add_argument("--window", nargs="+", default=None, help="Omega window as LO:HI or LO HI")
        cmd.add_argument("--m", default="3", help="Symmetry: 3, 3,5,7 or 3:6")
        cmd.add_argument("--n", type=int, default=1, help="Mode index for operator-spectrum")
        cmd.add_argument("--n-max", type=int, default=8, help="Highest multiple checked by certify")
        cmd.add_argument("--alpha", type=float, default=1.5, help="Abundance window exponent")
        cmd.add_argument("--regime", choices=REGIMES, default=None)
        cmd.add_argument("--omega", type=float, default=None)
        cmd.add_argument("--format", choices=("csv", "json"), default="json")
        cmd.add_argument("--out", default=None, help="Output path (default stdout)")
        cmd.add_argument("--verbose", "-v", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace, settings: Settings) -> RunConfig:
    return RunConfig(
        profile=args.profile,
        command=args.command,
        tol=args.tol if args.tol is not None else settings.tol,
        grid=args.grid if args.grid is not None else settings.grid,
        window=parse_window(args.window) if args.window else None,
        m=parse_modes(args.m),
        n=args.n,
        n_max=args.n_max,
        alpha=args.alpha,
        regime=args.regime,
        omega=args.omega,
        format=args.format,
        out=args.out,
        threads=settings.threads,
    )


def join_window_tokens(argv: Sequence[str]) -> List[str]:
    """
    Rewrite ``--window LO:HI`` as ``--window=LO:HI``.

    argparse only treats plain numbers like ``-0.7`` as values; a token such
    as ``-0.7:-0.6`` would otherwise be read as an unknown option.
    """
    tokens = list(argv)
    joined: List[str] = []
    i = 0
    while i < len(tokens):
        if tokens[i] == "--window" and i + 1 < len(tokens) and ":" in tokens[i + 1]:
            joined.append(f"--window={tokens[i + 1]}")
            i += 2
        else:
            joined.append(tokens[i])
            i += 1
    return joined


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(join_window_tokens(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        config = config_from_args(args, Settings.from_env())
    except ValueError as e:
        logger.error(f"Invalid arguments: {e}")
        return _diagnose({"error": "ValueError", "message": str(e), "exit_code": EXIT_VALIDATION}, EXIT_VALIDATION)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
