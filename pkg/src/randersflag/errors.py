class RandersFlagError(Exception):
    """Base class for every error raised by randersflag"""

    exit_code = 1


class InputError(RandersFlagError):
    """Problem file or command-line input that cannot be used"""

    exit_code = 1


class ValidationError(InputError):
    """A structural invariant does not hold within its tolerance"""


class StrongConvexityError(ValidationError):
    """The drift is too long: <X,X> must stay below 1"""


class DimensionError(InputError):
    """Vector or matrix shape does not match the algebra dimension"""


class DegeneracyError(InputError):
    """Dependent vectors, a zero pole or a degenerate plane"""


class ProjectionCollapseError(DegeneracyError):
    """A vector has no component left after projection onto m"""


class UsageError(RandersFlagError):
    """An operation was called outside of its hypothesis"""

    exit_code = 2


class NumericalFailure(RandersFlagError):
    """Internal numerical failure (exhausted resampling, non-finite values)"""

    exit_code = 3
