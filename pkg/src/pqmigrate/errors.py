"""Exception types shared across the package."""


class PqmigrateError(Exception):
    """Base class for all package errors."""


class InputError(PqmigrateError):
    """Caller supplied an invalid value.

    ``field`` names the offending record field when one can be identified.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class GenerationError(PqmigrateError):
    """Dataset generation could not satisfy its configuration."""


class EncodingError(InputError):
    """A record cannot be encoded under the active feature schema."""


class ModelLoadError(PqmigrateError):
    """A persisted model document is unreadable or incompatible."""
