"""Exception types.

Validation failures raise InvalidInputError, which is also a ValueError
so that plain try/except ValueError keeps working.  Numerical failures
(quadrature, fitting) get their own classes; configuration and data
files get ConfigError and DataFormatError carrying line numbers.
"""


class ToolkitError(Exception):
    """Base class for every toolkit-specific failure."""


class InvalidInputError(ToolkitError, ValueError):
    """A domain object or argument violates its validity constraints."""


class EvanescentOrderError(InvalidInputError):
    """Requested diffraction order has |n| lambda / d > 1, so no real angle."""


class QuadratureError(ToolkitError):
    """A quadrature could not reach the requested tolerance.

    Attributes
    ----------
    achieved : float or None
        Best relative error estimate reached before giving up.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class FitFailureError(ToolkitError):
    """A least-squares fit did not converge."""


class MissingPeakError(ToolkitError):
    """No statistically significant peak near one or more expected centers.

    Attributes
    ----------
    centers : tuple of float
        Expected peak centers (rad) where nothing was found.
    """

    def __init__(self, message, centers=()):
        super().__init__(message)
        self.centers = tuple(centers)


class BoundarySolutionError(ToolkitError):
    """The chi^2 minimum sits on the edge of the C3 search interval."""


class MultimodalObjectiveError(ToolkitError):
    """chi^2(C3) has more than one local minimum on the search interval."""


class ConfigError(ToolkitError):
    """Config text violates the grammar or the key table.

    Attributes
    ----------
    line : int or None
        1-based line number in the config source, when attributable.
    key : str or None
        Dotted key path, when attributable.
    """

    def __init__(self, message, line=None, key=None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if key is not None:
            parts.append(key)
        if parts:
            message = f"{message} [{', '.join(parts)}]"
        super().__init__(message)
        self.line = line
        self.key = key


class DataFormatError(ToolkitError):
    """A CSV or table file violates its schema.

    Attributes
    ----------
    line : int or None
        1-based line number in the offending file, when attributable.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} [line {line}]"
        super().__init__(message)
        self.line = line
