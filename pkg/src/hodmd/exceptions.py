"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`HodmdError`,
and most also derive from the builtin that best describes them so callers can
catch ``ValueError`` without importing anything from here.
"""


class HodmdError(Exception):
    """Base class for all package errors."""


class InvalidShapeError(HodmdError, ValueError):
    """Array has the wrong order or extents for the requested operation."""


class InvalidInputError(HodmdError, ValueError):
    """Input contains non-finite values or violates a value constraint."""


class DegenerateInputError(HodmdError, ValueError):
    """Input is numerically degenerate (e.g. an all-zero matrix)."""


class WindowError(HodmdError, ValueError):
    """Delay index is too large for the number of snapshots."""


class ConfigurationError(HodmdError, ValueError):
    """Unknown option or parameter outside its admissible range."""


class BoundaryError(HodmdError, ValueError):
    """Slice has no neighbour on one side and cannot be interpolated."""


class OverflowGuardError(HodmdError, ArithmeticError):
    """Extrapolating a growing mode would blow up exponentially."""


class FormatError(HodmdError, ValueError):
    """Malformed tensor file.

    Parameters
    ----------
    message : str
        Human readable description.
    offset : int, optional
        Byte offset at which the problem was detected.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
