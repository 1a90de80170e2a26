"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A configuration value is missing, out of range, or inconsistent."""


class ModelDomainError(ValueError):
    """Inputs leave the domain where the analytical model is defined."""


class TraceFormatError(ValueError):
    """A position trace is malformed; message carries the offending line."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class NumericError(RuntimeError):
    """A numerical routine failed to converge to the requested tolerance."""
