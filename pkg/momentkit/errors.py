"""Exception hierarchy for momentkit.

Validation problems (bad input, a prefix too short, a precondition the data
does not meet) exit with code 2. Numerical problems (cross-checks that fail,
conditioning aborts, poles) exit with code 3.
"""

from typing import Any, Dict


class MomentError(Exception):
    """Base class for every error raised by the library."""

    exit_code = 1

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.details = details

    def to_record(self) -> Dict[str, Any]:
        """Structured error record for reports."""
        return {
            'error': self.__class__.__name__,
            'message': self.message,
            'details': {k: str(v) for k, v in sorted(self.details.items())},
        }


class ValidationError(MomentError):
    exit_code = 2


class NumericalError(MomentError):
    exit_code = 3


# === Validation ===

class EmptyInput(ValidationError):
    pass


class NonpositiveMass(ValidationError):
    pass


class TooShort(ValidationError):
    pass


class UnknownFamily(ValidationError):
    pass


class OddShiftOnHamburger(ValidationError):
    pass


class NotStieltjes(ValidationError):
    pass


class CoincidentPoints(ValidationError):
    pass


class CoincidentNodes(ValidationError):
    pass


class LowerHalfPlanePoint(ValidationError):
    pass


class UnsupportedShape(ValidationError):
    pass


class InvalidDensity(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class InvalidPrecision(ValidationError):
    pass


class DegenerateSequence(ValidationError):
    """A zero norm was met: the moments come from a finitely supported measure."""


class ZeroDenominator(ValidationError):
    pass


class KreinCornerUndefined(ValidationError):
    pass


class NotExists(ValidationError):
    """The requested Padé approximant does not exist."""


# === Numerical ===

class ConvergenceFailure(NumericalError):
    pass


class PoleHit(NumericalError):
    pass


class CrossCheckFailure(NumericalError):
    """Two independent routes to the same quantity disagree."""


class NonpositiveRadicand(NumericalError):
    pass


class NonHerglotzOutput(NumericalError):
    pass


class NonRealResult(NumericalError):
    pass


class ConditioningError(NumericalError):
    pass
