"""
Error types for the numtheory app.

Every error carries ``code`` (its class name, shown by the CLI) and
``exit_code`` (1 for domain errors, 2 for usage and input errors).
"""


class NumTheoryError(Exception):
    exit_code = 1

    @property
    def code(self):
        return type(self).__name__


class InputError(NumTheoryError, ValueError):
    """Malformed or out-of-contract input; reported as a usage error."""
    exit_code = 2


class ParseError(InputError):
    pass


class UnknownSuite(InputError):
    pass


class InvalidExponent(InputError):
    pass


class PreconditionViolation(InputError):
    pass


# scalars

class NonPrimeModulus(NumTheoryError, ValueError):
    pass


class PrimeMismatch(NumTheoryError, ValueError):
    pass


class DivisionByZero(NumTheoryError, ZeroDivisionError):
    pass


class PrecisionExhausted(NumTheoryError, ArithmeticError):
    pass


class BudgetExceeded(NumTheoryError, ValueError):
    pass


class NonFiniteInput(NumTheoryError, ValueError):
    pass


class LengthMismatch(NumTheoryError, ValueError):
    pass


class NonDecreasingRho(NumTheoryError, ValueError):
    pass


# series

class KindMismatch(NumTheoryError, TypeError):
    pass


class NonConvergenceSuspected(NumTheoryError, ArithmeticError):
    pass


class MonotonicityViolation(NumTheoryError, ValueError):

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DomainError(NumTheoryError, ValueError):
    pass


class NoValuationCertificate(NumTheoryError, ValueError):
    pass


class UnboundedCoefficients(NumTheoryError, ValueError):
    pass


class OverflowRisk(NumTheoryError, OverflowError):
    pass


class ZeroArgument(NumTheoryError, ValueError):
    pass


class OffCircleWithInfiniteSupport(NumTheoryError, ValueError):
    pass


class NonSquareMatrix(NumTheoryError, ValueError):
    pass


# norms

class OrderViolation(NumTheoryError, ValueError):
    pass


class DimensionMismatch(NumTheoryError, ValueError):
    pass


# operators

class NotSelfAdjoint(NumTheoryError, ValueError):
    pass


class NotOrthonormal(NumTheoryError, ValueError):
    pass


class Singular(NumTheoryError, ArithmeticError):
    pass


class DimensionTooLarge(NumTheoryError, ValueError):
    pass


# lattice

class NotInZE(NumTheoryError, ValueError):
    pass


class SearchExhausted(NumTheoryError, RuntimeError):
    pass


class AsymmetricRegion(NumTheoryError, ValueError):
    pass


class NonConvexRegion(NumTheoryError, ValueError):
    pass


class TheoremViolation(NumTheoryError, AssertionError):
    """A guaranteed statement failed at runtime; always a bug."""
    pass


def error_names():
    """Names of every concrete error, as printed by the CLI."""
    seen = []
    pending = [NumTheoryError]
    while pending:
        cls = pending.pop(0)
        for sub in cls.__subclasses__():
            if sub.__name__ not in seen:
                seen.append(sub.__name__)
                pending.append(sub)
    return sorted(name for name in seen if name != 'InputError')
