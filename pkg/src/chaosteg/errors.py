"""Exception taxonomy shared across the package."""

from __future__ import annotations

__all__ = [
    "ChaostegError",
    "ContractError",
    "DomainError",
    "IterationBudgetError",
    "ParseError",
    "UnderpoweredTestError",
]


class ChaostegError(Exception):
    """Base class for every error raised by this package."""


class ContractError(ChaostegError):
    """A caller violated a documented precondition or type invariant."""


class DomainError(ChaostegError):
    """A numeric argument fell outside its mathematical domain."""


class IterationBudgetError(ChaostegError):
    """A strategy was asked for more terms than it can provide."""


class ParseError(ChaostegError):
    """Malformed external input: cover file, key string, or config file."""


class UnderpoweredTestError(ChaostegError):
    """A statistical verdict was requested with too small a sample."""
