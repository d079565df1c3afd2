"""Exception hierarchy.

Parameter and configuration problems derive from :class:`ParameterError`
(a ``ValueError``); failures of the numerical machinery derive from
:class:`NumericalError`. The CLI maps the first family to exit code 1 and
the second to exit code 2.
"""


class RefractionBilliardError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(RefractionBilliardError, ValueError):
    """Invalid physical parameters or configuration."""


class NonPositiveParameter(ParameterError):
    pass


class HillViolation(ParameterError):
    """``2 E <= omega**2``: the unit circle is not inside the Hill region."""


class OutsideHill(ParameterError):
    """A point where the outer potential would be negative."""


class NumericalError(RefractionBilliardError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


class OriginSingularity(NumericalError):
    pass


class DegenerateVelocity(NumericalError):
    pass


class TangencyError(NumericalError):
    """An arc meets the boundary tangentially."""


class TangentialLaunch(TangencyError):
    pass


class TangentialEntry(TangencyError):
    pass


class CrossingNotBracketed(NumericalError):
    pass


class CurveInversionFailure(NumericalError):
    pass


class RadialTangency(NumericalError):
    pass


class NotHomothetic(NumericalError):
    pass


class DegenerateQuadruple(NumericalError):
    pass


class NoSignChange(NumericalError):
    pass
