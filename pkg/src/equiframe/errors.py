"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Input outside an operation's domain."""


class ConstructionInvalid(RuntimeError):
    """A constructed frame failed its own certification."""


class InvalidState(ValueError):
    """A quantum state or measurement distribution is not normalized."""


class UndefinedEstimate(ValueError):
    """An estimator was asked for a value with no supporting samples."""


class SearchBudgetExceeded(RuntimeError):
    """Exhaustive search stopped before covering the whole space.

    ``partial`` holds the SearchReport assembled so far and ``progress`` the
    fraction of the candidate space that was examined.
    """

    def __init__(self, message, partial=None, progress=0.0):
        super().__init__(message)
        self.partial = partial
        self.progress = progress
