"""Exception hierarchy shared across the package.

Everything derives from :class:`TecMapError` so callers can catch one
base class; each subclass also inherits ``ValueError`` to stay friendly
to generic error handling.
"""


class TecMapError(ValueError):
    """Base class for all errors raised by this package."""


class ParameterError(TecMapError):
    """A parameter is outside its documented domain."""


class DimensionError(TecMapError):
    """Array or grid shapes do not agree."""


class OutOfRegionError(TecMapError):
    """A coordinate lies farther than half a pixel outside the grid."""


class DegenerateInputError(TecMapError):
    """Input is structurally valid but carries no usable information."""


class NoObservationsError(TecMapError):
    """No measurement survived snapping onto the grid."""


class FitError(TecMapError):
    """Model fitting has too little data to proceed."""


class ParseError(TecMapError):
    """A file is malformed; message carries the offending line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class ValidationError(TecMapError):
    """A file parsed cleanly but violates a documented invariant."""
