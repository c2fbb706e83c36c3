"""Exception types shared across the library."""


class ComplexTrajError(Exception):
    """Base class for library-specific errors."""


class InputDomainError(ComplexTrajError, ValueError):
    """An argument is outside the range an operation supports."""


class OutsidePhysicalDomainError(ComplexTrajError, ValueError):
    """Re(x) lies outside the open interval on which a bound state is defined."""

    def __init__(self, x, domain, message=None):
        self.x = x
        self.domain = domain
        super().__init__(
            message
            or f"Re(x)={x.real:g} outside open domain ({domain[0]:g}, {domain[1]:g})"
        )


class PoleProximityError(ComplexTrajError, ArithmeticError):
    """The wavefunction magnitude fell below the pole guard threshold.

    The log-derivative velocity diverges at zeros of psi; integration
    accuracy is lost well before an exact zero is hit.
    """

    def __init__(self, x, psi_abs, threshold=None):
        self.x = x
        self.psi_abs = psi_abs
        self.threshold = threshold
        super().__init__(f"|psi|={psi_abs:.3e} near pole at x={x:.6g}")


class PotentialSingularityError(ComplexTrajError, ArithmeticError):
    """A classical force was requested too close to a potential singularity."""

    def __init__(self, x, message=None):
        self.x = x
        super().__init__(message or f"potential singular at x={x:.6g}")


class PrecisionError(ComplexTrajError, ArithmeticError):
    """A numerically determined constant failed to converge to tolerance."""


class DegenerateFitError(ComplexTrajError, ValueError):
    """Samples are collinear; no ellipse can be fitted.

    Carries the fitted line as (point, direction) so callers can still
    report the degenerate geometry.
    """

    def __init__(self, point, direction, message=None):
        self.point = point
        self.direction = direction
        super().__init__(
            message
            or f"collinear samples along direction {direction:.4g} through {point:.4g}"
        )


class ConfigError(ComplexTrajError, ValueError):
    """A scenario configuration is invalid.  Collects every violation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid scenario config:\n  " + "\n  ".join(self.violations))
