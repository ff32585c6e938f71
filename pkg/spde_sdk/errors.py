"""
Errors Module

Exception hierarchy shared by every part of the SDK. Library code raises these
instead of returning ``(ok, message)`` pairs; the command-line runner maps them
to exit codes.

Author: graded-spde-sdk developers
"""

from typing import Optional


class SpdeError(Exception):
    """Base class for all SDK errors."""


class DomainError(SpdeError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(SpdeError, ValueError):
    """
    A mesh, spectrum or experiment configuration failed validation.

    Args:
        message: Human-readable explanation
        index: Offending mesh index, when the failure is index-specific
        key: Offending configuration key, when the failure is key-specific
    """

    def __init__(self, message: str, index: Optional[int] = None, key: Optional[str] = None):
        super().__init__(message)
        self.index = index
        self.key = key

    def __reduce__(self):
        return type(self), (str(self), self.index, self.key)


class NumericError(SpdeError, ArithmeticError):
    """
    A computation produced a non-finite value.

    Args:
        message: Human-readable explanation
        step: Time step index at which the value appeared
        sample_index: Monte Carlo sample being integrated
        node: Collocation node at which the drift was non-finite
    """

    def __init__(self, message: str, step: Optional[int] = None,
                 sample_index: Optional[int] = None, node: Optional[int] = None):
        super().__init__(message)
        self.step = step
        self.sample_index = sample_index
        self.node = node

    def __reduce__(self):
        # keep the context attributes when raised inside a worker process
        return type(self), (str(self), self.step, self.sample_index, self.node)

    def with_sample(self, sample_index: int) -> "NumericError":
        """Return a copy of this error tagged with the sample that produced it."""
        return NumericError(f"sample {sample_index}: {self}", step=self.step,
                            sample_index=sample_index, node=self.node)


class ReportError(SpdeError, OSError):
    """Reading or writing a report file failed."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message}: {path}")
        self.message = message
        self.path = path

    def __reduce__(self):
        return type(self), (self.message, self.path)
