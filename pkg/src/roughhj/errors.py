"""Exception types shared across the package."""


class RoughHJError(Exception):
    """Base class for all errors raised by roughhj."""


class DomainError(RoughHJError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ConfigError(RoughHJError, ValueError):
    """A configuration is invalid or cannot be honoured (grid too small, CFL, ...)."""


class ContractError(RoughHJError, RuntimeError):
    """A precondition of a checker, or a caller-supplied object, broke its contract."""
