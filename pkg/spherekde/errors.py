# spherekde/errors.py
# Exception hierarchy. Each error carries the exit code the CLI returns for it.


class SphereKDEError(Exception):
    """Base error. `exit_code` plays the role of an HTTP status code for the CLI."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(SphereKDEError, ValueError):
    """Argument outside the mathematical domain of the operation."""

    exit_code = 3


class MomentError(SphereKDEError, ValueError):
    """A kernel moment integral diverged or failed to converge."""

    exit_code = 3


class ConfigurationError(SphereKDEError, ValueError):
    """Empty bandwidth grid or invalid settings."""

    exit_code = 3


class InsufficientDataError(SphereKDEError, ValueError):
    """Sample too small for the requested operation."""

    exit_code = 4


class InputFormatError(SphereKDEError, ValueError):
    """Point file or config file could not be parsed."""

    exit_code = 2
