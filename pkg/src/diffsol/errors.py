"""Exception and warning types.

Two families matter to callers: :class:`ValidationError` (bad input, CLI exit
status 1) and :class:`NumericError` (the numerics refused or failed, exit
status 2).
"""

from __future__ import annotations


class DiffSolError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DiffSolError, ValueError):
    pass


class NumericError(DiffSolError, ArithmeticError):
    pass


class BetaZero(ValidationError):
    pass


class GNontrivial(ValidationError):
    pass


class BadDegree(ValidationError):
    pass


class NotARoot(ValidationError):
    pass


class NoHyperbolicCase(ValidationError):
    pass


class RepeatedRoot(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, line: int, key: str, reason: str):
        self.line = line
        self.key = key
        self.reason = reason
        super().__init__(f"line {line}: {key}: {reason}")


class SemanticError(ValidationError):
    """A parsed config that describes an invalid equation.

    ``reason`` is the name of the underlying validation error
    (``"BetaZero"``, ``"BadDegree"``, ...).
    """

    def __init__(self, line: int, key: str, cause: ValidationError):
        self.line = line
        self.key = key
        self.cause = cause
        self.reason = type(cause).__name__
        super().__init__(f"line {line}: {key}: {self.reason}: {cause}")


class SmallDivisor(NumericError):
    def __init__(self, k: int, divisor: complex):
        self.k = k
        self.divisor = divisor
        super().__init__(
            f"|D(lambda^{k})| = {abs(divisor):.3e} is below the small-divisor "
            f"threshold; order {k} is resonant, use solve_resonant"
        )


class NotResonant(NumericError):
    pass


class AmbiguousBranch(NumericError):
    pass


class DegenerateSeries(NumericError):
    pass


class OutsideDomain(NumericError):
    pass


class ManifoldResonance(NumericError):
    def __init__(self, n: int, divisor: complex):
        self.n = n
        self.divisor = divisor
        super().__init__(
            f"|lam_x^{n} - lam_y| = {abs(divisor):.3e}: manifold equation is "
            f"resonant at order {n}"
        )


class NewtonDiverged(NumericError):
    pass


class OutsideBox(NumericError):
    pass


class DivisionNearZero(NumericError):
    def __init__(self, message: str, partial: list):
        self.partial = partial
        super().__init__(message)


class DomainWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass
