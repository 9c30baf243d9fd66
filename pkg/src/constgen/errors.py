"""Exception hierarchy shared by all layers."""


class ConstgenError(Exception):
    """Base class for every error raised by the package."""


class PrecisionExhausted(ConstgenError):
    pass


class NonUnit(ConstgenError, ArithmeticError):
    pass


class NotContained(ConstgenError):
    pass


class InfiniteIndex(ConstgenError):
    pass


class NotPPowerOrder(ConstgenError):
    pass


class DiscontinuousAction(ConstgenError):
    pass


class BudgetExceeded(ConstgenError):
    pass


class NotAPGroup(ConstgenError):
    pass


class ConstraintViolation(ConstgenError, ValueError):
    pass


class CertificateUnavailable(ConstgenError):
    pass


class NotOrderDividingP(ConstgenError, ValueError):
    pass


class NotAntisymmetric(ConstgenError, ValueError):
    pass


class JacobiFails(ConstgenError, ValueError):
    pass


class SpecSyntaxError(ConstgenError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class SpecSemanticError(ConstgenError, ValueError):
    pass
