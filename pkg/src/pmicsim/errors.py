class PmicError(Exception):
    """Base class for all errors raised by pmicsim."""


class DomainError(PmicError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(PmicError, ValueError):
    """Input data violates a stated constraint (normalization, resolution, shape...)."""


class ConfigError(ValidationError):
    """A run configuration is malformed; carries the offending key and line."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line
