"""Exception hierarchy shared by all modules."""


class DropselectError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DropselectError):
    """Invalid or malformed input data (files, columns, labels)."""


class NumericalError(DropselectError):
    """A numerical computation could not be completed."""


class SingularFitError(NumericalError):
    """A least-squares design is rank deficient.

    ``column`` is the index of the offending feature column when known
    (-1 when the dependency involves the intercept).
    """

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class SingularScatterError(NumericalError):
    """The within-class scatter matrix is singular and no ridge was applied."""


class EstimationError(NumericalError):
    """A variance estimate came out non-positive; supply an override."""
