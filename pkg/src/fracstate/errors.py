"""Exception hierarchy shared by all fracstate modules."""


class FracStateError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(FracStateError, ValueError):
    """A numeric argument violates its documented domain."""


class InvalidModelError(InvalidArgumentError):
    """A plant, state-space model or controller fails its invariants."""


class ConfigurationError(FracStateError, ValueError):
    """A run configuration or operator setup cannot be used.

    ``key`` names the offending configuration key when there is one.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class InstabilityError(FracStateError, ArithmeticError):
    """A simulation produced a non-finite value.

    ``step`` is the index of the first sample that went bad.
    """

    def __init__(self, step, message=None):
        super().__init__(message or f"non-finite state at step {step}")
        self.step = step


class ConvergenceError(FracStateError, ArithmeticError):
    """A continued-fraction expansion broke down before the requested depth."""
