"""Exception hierarchy shared by the solver modules and the CLI."""


class NetGameError(Exception):
    """Base class for all package errors."""


class InvalidGraphError(NetGameError, ValueError):
    pass


class InvalidParameterError(NetGameError, ValueError):
    pass


class InvalidStrategyError(NetGameError, ValueError):
    pass


class WrongRegimeError(NetGameError, ValueError):
    """A regime-specific solver was called outside its parameter region."""


class UndefinedCaseError(NetGameError, ArithmeticError):
    """A closed-form case is undefined for the given thresholds."""


class ResourceLimitError(NetGameError, RuntimeError):
    """An exhaustive computation would exceed its configured budget."""
