"""Exception types raised across the package."""


class TwoModeError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(TwoModeError, ValueError):
    """A physical parameter lies outside its allowed domain."""


class ClosedFormDomainError(ParameterDomainError):
    """The analytic coefficient formulas are not defined for these parameters (e.g. omega <= 0)."""


class InstabilityError(TwoModeError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class NumericalDegeneracyError(TwoModeError, ArithmeticError):
    """A linear system or closed-form expression is (numerically) singular."""


class DivergenceError(TwoModeError, ArithmeticError):
    """A time integration produced non-finite or runaway values."""


class ClosedFormConditioningWarning(UserWarning):
    """Closed-form evaluation close to the stability boundary; expect lost digits."""
