"""
Bifurcation Pipeline

Chains the per-symmetry steps: bracket a dispersion root, certify it, build
the kernel generator and evaluate transversality. Used by the CLI and the
batch script.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src.dispersion import (
    DispersionRoot,
    EigenvalueCertificate,
    certify,
    find_abundance_root,
    scan_scarcity,
)
from src.errors import NoSignChange, VortexSpectraError
from src.kernel import KernelGenerator, TransversalityReport, kernel_generator, transversality
from src.modes import omega_hat
from src.numerics import parallel_map
from src.profile import Profile

logger = logging.getLogger(__name__)

SCARCITY = "scarcity"
ABUNDANCE = "abundance"
REGIMES = (SCARCITY, ABUNDANCE)


@dataclass(frozen=True)
class BifurcationResult:
    """Everything established for one symmetry m."""

    m: int
    regime: str
    root: DispersionRoot
    certificate: EigenvalueCertificate
    kernel: KernelGenerator
    report: TransversalityReport
    omega_hat: float

    def summary(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "regime": self.regime,
            "omega": self.root.omega,
            "omega_hat": self.omega_hat,
            "zeta_residual": self.root.residual,
            "normalization_check": self.kernel.normalization_check,
            "kernel_residual": self.kernel.kernel_residual,
            "I_m": self.report.I_m,
            "I_m1": self.report.parts[0],
            "I_m2": self.report.parts[1],
            "I_m3": self.report.parts[2],
            "kappa": self.report.kappa,
            "error_bar": self.report.error_bar,
            "verdict": self.report.verdict,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "summary": self.summary(),
            "certificate": self.certificate.to_dict(),
            "kernel": self.kernel.to_dict(),
            "transversality": self.report.to_dict(),
        }


def _complete(p: Profile, m: int, regime: str, root: DispersionRoot, tol: float, threads: int) -> BifurcationResult:
    certificate = certify(p, m, root.omega, tol=tol, threads=threads)
    kg = kernel_generator(p, m, root.omega, tol=tol)
    report = transversality(p, m, root.omega, tol=tol)
    return BifurcationResult(
        m=m,
        regime=regime,
        root=root,
        certificate=certificate,
        kernel=kg,
        report=report,
        omega_hat=omega_hat(p, m),
    )


def scarcity_pipeline(p: Profile, m: int, tol: float = 1e-10, threads: int = 1) -> BifurcationResult:
    """
    Full analysis of symmetry m for a positive profile.

    Raises:
        WrongRegime, NotAdmissible: From the scarcity scan
        NoSignChange: If the scan brackets no root
        CertificateFailed, NotARoot: From the later stages
    """
    scan = scan_scarcity(p, m, tol=tol, threads=threads)
    if not scan.roots:
        raise NoSignChange(f"zeta_{m} keeps one sign on the scarcity window", {"m": m, "window": list(scan.window)})
    return _complete(p, m, SCARCITY, scan.roots[0], tol, threads)


def abundance_pipeline(
    p: Profile,
    m: int,
    alpha: float = 1.5,
    tol: float = 1e-10,
    threads: int = 1,
    max_m: Optional[int] = None,
) -> BifurcationResult:
    """
    Full analysis for a negative profile, starting at m and moving up in steps of
    10 when the window has no sign change.
    """
    found_m, root = find_abundance_root(p, m, alpha=alpha, tol=tol, max_m=max_m, threads=threads)
    if found_m != m:
        logger.info(f"Abundance root for m={m} found at m={found_m}")
    return _complete(p, found_m, ABUNDANCE, root, tol, threads)


def run_pipeline(p: Profile, m: int, regime: str, alpha: float = 1.5, tol: float = 1e-10, threads: int = 1):
    if regime == SCARCITY:
        return scarcity_pipeline(p, m, tol=tol, threads=threads)
    if regime == ABUNDANCE:
        return abundance_pipeline(p, m, alpha=alpha, tol=tol, threads=threads, max_m=m)
    raise ValueError(f"Unknown regime: {regime!r}")


def find_eigenvalues(
    p: Profile,
    ms: Sequence[int],
    regime: str,
    alpha: float = 1.5,
    tol: float = 1e-10,
    threads: int = 1,
) -> pd.DataFrame:
    """
    Run the pipeline for each m. Failures are recorded per row, not raised.

    Returns:
        DataFrame sorted by m with a ``status`` column ("ok" or the error name)
    """

    def one(m: int) -> Dict[str, Any]:
        try:
            # Workers share the pool; each pipeline runs serially inside it
            return {**run_pipeline(p, m, regime, alpha=alpha, tol=tol, threads=1).summary(), "status": "ok"}
        except VortexSpectraError as e:
            logger.warning(f"m={m}: {type(e).__name__}: {e.message}")
            return {"m": m, "regime": regime, "status": type(e).__name__}

    rows: List[Dict[str, Any]] = parallel_map(one, list(ms), threads)
    frame = pd.DataFrame(rows)
    logger.info(f"✓ {int((frame['status'] == 'ok').sum())}/{len(frame)} symmetries completed")
    return frame.sort_values("m").reset_index(drop=True)
