"""Exception hierarchy shared by every module of the package."""


class AdelicError(Exception):
    """Base class for all errors raised by the engine."""


class InvalidExpr(AdelicError):
    pass


class UnsupportedExpression(AdelicError):
    pass


class UnsupportedRing(AdelicError):
    pass


class InvalidPrime(AdelicError):
    pass


class UnknownPrime(AdelicError):
    pass


class CompositionNonzero(AdelicError):
    """Raised when d_out * d_in is not the zero matrix."""


class DegreeBoundExceeded(AdelicError):
    pass


class CarrierMismatch(AdelicError):
    pass


class FamilyProductRemains(AdelicError):
    """Homology was requested on a carrier that still holds a symbolic product."""


class NotRepresentable(AdelicError):
    pass


class NonCommuting(AdelicError):
    pass


class MissingGenerators(AdelicError):
    pass


class LawViolation(AdelicError):
    def __init__(self, message, flag=None, a=None, b=None):
        super().__init__(message)
        self.flag = flag
        self.a = a
        self.b = b


class NotCocartesian(AdelicError):
    pass


class ScenarioError(AdelicError):
    """Scenario file could not be parsed; ``field`` names the offending path."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if field is not None:
            loc.append(f"field {field}")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.field = field
        self.line = line
