"""Custom exceptions module."""

from .const import EXIT_CONFIG_ERROR, EXIT_INTEGRITY_ERROR, EXIT_IO_ERROR


class BenchError(Exception):
    """Base Exception carrying the process exit code."""

    exit_code = 1


class ConfigError(BenchError):
    """Exception raised for an invalid run configuration."""

    exit_code = EXIT_CONFIG_ERROR


class OutputError(BenchError):
    """Exception raised when an output file cannot be written."""

    exit_code = EXIT_IO_ERROR

    def __init__(self, message: str, path=None):
        super().__init__(message)
        self.path = path


class IntegrityError(BenchError):
    """Exception raised for a bound violation or a non-finite iterate."""

    exit_code = EXIT_INTEGRITY_ERROR

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = violations or []
