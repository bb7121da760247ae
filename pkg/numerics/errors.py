from typing import Dict, Optional


class SteinError(Exception):
    """Base class for every failure raised by the SteinBounds packages"""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context: Dict = context

    def to_dict(self) -> Dict:
        return {
            'error_type': type(self).__name__,
            'message': self.message,
            'context': {key: _plain(value) for key, value in self.context.items()},
        }


class InvalidParameter(SteinError):
    """Distribution or function parameter outside its valid range"""


class NotNormalized(SteinError):
    """Density does not integrate to one"""


class UnsupportedSupport(SteinError):
    """Shift incompatible with the measure of the target"""


class MissingDerivative(SteinError):
    """Derivative needed but absent and finite differences disabled"""


class ZeroDensity(SteinError):
    """Evaluation requested where the density vanishes"""


class NotIntegrable(SteinError):
    """Integral or sum diverges"""


class DegenerateDenominator(SteinError):
    """Division by a quantity that vanishes inside the support"""


class SignViolation(SteinError):
    """Weight expected to be nonnegative takes negative values"""


class UnsupportedOrder(SteinError):
    """Expansion order beyond what the support or the configuration allows"""


class NoConvergence(SteinError):
    """Adaptive quadrature gave up before reaching the tolerance"""


class ValidationError(SteinError):
    """Malformed run specification"""


def _plain(value):
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


def error_entry(exc: Exception, command: Optional[str] = None) -> Dict:
    """Structured report entry for any exception"""
    if isinstance(exc, SteinError):
        entry = exc.to_dict()
    else:
        entry = {'error_type': type(exc).__name__, 'message': str(exc), 'context': {}}
    if command:
        entry['command'] = command
    return entry
