"""
Error hierarchy for the point-transformation diffusion toolkit.

Every failure the library can signal is a named subclass of PtDiffError.
The CLI maps the three families onto exit codes:
    ConfigError          -> 2
    NumericalError       -> 3
    PropertyCheckFailure -> 1
"""

from typing import Optional


class PtDiffError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 3

    def __init__(self, message: str, field_path: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field_path = field_path

    @property
    def name(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        if self.field_path:
            return f"{self.name} at '{self.field_path}': {self.message}"
        return f"{self.name}: {self.message}"


class ConfigError(PtDiffError):
    exit_code = 2


class NumericalError(PtDiffError):
    exit_code = 3


class PropertyCheckFailure(PtDiffError):
    exit_code = 1


# ---------------------------
# transform_core
# ---------------------------

class NonPositiveBeta(ConfigError):
    pass


class EvenLeadingPower(ConfigError):
    pass


class NegativeCoefficient(ConfigError):
    pass


class EvenCoefficientNotDominated(ConfigError):
    pass


class AllZeroCoefficients(ConfigError):
    pass


class Unbounded(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


# ---------------------------
# operator_assembly
# ---------------------------

class BadBounds(ConfigError):
    pass


class OddNodeCountOnSymmetricDomain(ConfigError):
    pass


class SingularWeight(NumericalError):
    pass


class EigensolveFailure(NumericalError):
    pass


# ---------------------------
# spectral_transforms
# ---------------------------

class OrderOutOfRange(NumericalError):
    pass


class TruncationUnsafe(NumericalError):
    pass


class NotMonomial(ConfigError):
    pass


class BetaTooSmall(ConfigError):
    pass


# ---------------------------
# diffusion_solvers
# ---------------------------

class NoKernelAvailable(ConfigError):
    pass


class StepTooLarge(NumericalError):
    pass


# ---------------------------
# scaling_analysis
# ---------------------------

class NormalizationDrift(NumericalError):
    pass


class WindowTooSparse(NumericalError):
    pass


class NonPositiveExponent(NumericalError):
    pass


class SpanTooShort(NumericalError):
    pass
