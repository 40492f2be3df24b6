"""Exception types shared across the package.

Each class carries a short machine-readable ``category`` used by the CLI to
pick exit codes and to prefix error lines on stderr.
"""


class AuxflowError(Exception):
    """Base class for package errors."""

    category = "error"


class ConfigurationError(AuxflowError):
    """A config value is missing, malformed, or out of range."""

    category = "config"


class UsageError(AuxflowError):
    """An operation was called with incompatible arguments (wrong grid,
    wrong basis, mismatched shapes)."""

    category = "usage"


class OutputError(AuxflowError):
    """Reading or writing a result file failed."""

    category = "io"


class BlowUpError(AuxflowError):
    """A trajectory left the range of floating point numbers.

    Carries the step index and model time at which the first non-finite
    value appeared.
    """

    category = "blowup"

    def __init__(self, message, step_index, t):
        super().__init__(message)
        self.step_index = step_index
        self.t = t
