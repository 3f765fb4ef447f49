"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when an input violates a documented precondition."""


class NumericsError(RuntimeError):
    """Raised when a numerical routine fails its own diagnostics.

    Carries enough context (e.g. a refinement trace) to debug the failure;
    the CLI maps this to a distinct exit code.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
