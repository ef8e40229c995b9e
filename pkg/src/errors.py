"""
Vortex Spectra Errors

Exception hierarchy shared by every analysis module. Each error carries the
process exit code the CLI reports and a machine-readable ``details`` dict that
ends up in JSON diagnostics.
"""

from typing import Any, Dict, Optional


class VortexSpectraError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        """Serialize for JSON diagnostics."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class ValidationError(VortexSpectraError):
    """Input rejected before any expensive numerics ran."""

    exit_code = 2


class NumericalError(VortexSpectraError):
    """A solver, quadrature or certificate did not meet its tolerance."""

    exit_code = 3


# Validation failures


class NonMonotone(ValidationError):
    """f0'(r)/r is not strictly positive on the validation grid."""


class SignChange(ValidationError):
    """f0 vanishes somewhere on [0, 1]."""


class BadTable(ValidationError):
    """Tabulated profile samples are malformed."""


class ForbiddenOmega(ValidationError):
    """Omega lies in the forbidden interval [kappa1, kappa2]."""


class SingularOmega(ValidationError):
    """Omega sits on the singular set where G_n(1) vanishes."""


class NotAdmissible(ValidationError):
    """Mode index outside the admissible range for the regime."""


class WrongRegime(ValidationError):
    """Operation requested in the wrong (focusing/defocusing) regime."""


class ConfigError(ValidationError):
    """Run or profile configuration could not be parsed."""


# Numerical failures


class QuadratureFailure(NumericalError):
    """Adaptive quadrature reported that its tolerance was not met."""


class NoContraction(NumericalError):
    """Fixed-point iteration and its collocation fallback both failed."""


class ToleranceNotMet(NumericalError):
    """A residual check exceeded the requested tolerance."""


class TailNotConverged(NumericalError):
    """The Prufer phase tail bound stayed above tolerance at the cap."""


class NoSignChange(NumericalError):
    """The dispersion function has equal signs at both window endpoints."""


class CertificateFailed(NumericalError):
    """An eigenvalue certificate check failed."""


class EigenSolveFailure(NumericalError):
    """Dense symmetric eigensolver failed or produced non-finite values."""


class NearSingular(NumericalError):
    """Linear system too ill-conditioned to solve reliably."""


class NotARoot(NumericalError):
    """Supplied Omega is not a dispersion root within tolerance."""
