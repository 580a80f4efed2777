"""Exception types shared across the package."""


class NetctrlError(Exception):
    """Base class for all package errors."""


class ParameterError(NetctrlError, ValueError):
    """A function argument is outside its documented domain."""


class ContractError(NetctrlError, ValueError):
    """An input violates a structural precondition (e.g. asymmetry)."""


class NumericalError(NetctrlError, ArithmeticError):
    """A numerical routine failed its own accuracy checks."""


class OverflowCapError(NetctrlError, OverflowError):
    """An exponent exceeds the linear-domain cap; use the log-domain path."""


class UncontrollableError(NetctrlError, ArithmeticError):
    """Gramian not positive definite up to tolerance.

    Carries the offending eigenvalues in ``m_eigs`` (linear or log scale,
    see ``log_scale``).
    """

    def __init__(self, message, m_eigs=None, log_scale=False):
        super().__init__(message)
        self.m_eigs = m_eigs
        self.log_scale = log_scale


class ConditioningError(NetctrlError, ArithmeticError):
    """Condition number beyond the cap configured for this operation."""


class ConfigError(NetctrlError, ValueError):
    """Invalid experiment configuration; message names the offending field."""
