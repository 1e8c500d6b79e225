"""Exception hierarchy shared by all modules.

Two families: ``ValidationError`` for rejected inputs or configurations
(CLI exit code 2) and ``NumericalError`` for failures detected while
computing (CLI exit code 3).  Every message names the offending value or
grid point so batch runs can be diagnosed from the log alone.
"""


class ValidationError(ValueError):
    """Bad input: wrong shape, out-of-range parameter, unknown name."""


class BadParams(ValidationError):
    pass


class UnknownEntry(ValidationError):
    pass


class EnumerationTooLarge(ValidationError):
    """Exact sign enumeration requested for more vectors than the cap allows."""


class ParameterOutOfRange(ValidationError):
    """A closed-form bound was requested outside its region of validity."""


class PhaseMismatch(ValidationError):
    """The rotation identity needs t*alpha to hit the phase of zeta exactly."""


class ConstantPolynomial(ValidationError):
    pass


class NumericalError(RuntimeError):
    """A computation failed or left its certified regime."""


class SpectrumHit(NumericalError):
    """Resolvent requested at (numerically) a spectral point."""


class QuadratureDivergence(NumericalError):
    """Node-doubling hit its cap while the quadrature was still moving."""


class ContourTooClose(NumericalError):
    """Integration contour passes too near a pole of the integrand."""


class NotARoot(NumericalError):
    """Synthetic division asked to remove a point that is not a root."""


class CoefficientOverflow(NumericalError):
    """Polynomial power produced non-finite coefficients."""


class SeriesNotConverged(NumericalError):
    pass


class TailTooFat(NumericalError):
    """Laplace-transform tail cannot be truncated below tolerance."""


class PeriodizationError(NumericalError):
    """Kernel mass leaks out of one period beyond tolerance."""


class DominationFailure(NumericalError):
    """Pointwise domination ratio is +inf: positive numerator over zero."""
