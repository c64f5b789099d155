"""Exception hierarchy shared by all modules."""


class MicrodynError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MicrodynError, ValueError):
    """An input lies outside the domain of an operation.

    ``field`` names the offending parameter when there is one.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class RangeError(DomainError):
    """A coordinate or time lies outside the valid interval."""


class DimensionError(DomainError):
    """A grid is too small for the requested stencil."""


class SolverError(MicrodynError):
    """A numerical integration failed; ``diagnostics`` carries the details."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class StabilityError(SolverError):
    """Time step violates the stability bound of an explicit scheme."""


class DivergenceError(SolverError):
    """Non-finite values appeared while stepping."""

    def __init__(self, message, step, diagnostics=None):
        super().__init__(message, diagnostics)
        self.step = step


class EscapeError(SolverError):
    """A trajectory left the valid field region inside the magnet."""

    def __init__(self, message, last_sample, diagnostics=None):
        super().__init__(message, diagnostics)
        self.last_sample = last_sample


class ConfigError(MicrodynError):
    """Invalid experiment configuration."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
