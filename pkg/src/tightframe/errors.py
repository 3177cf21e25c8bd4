"""Exception hierarchy shared by the numerical and decision modules."""


class TightFrameError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(TightFrameError):
    """A numerical kernel could not deliver its guarantee."""


class EigenConvergenceError(NumericalError):
    pass


class PositivityError(NumericalError):
    """Cholesky met a pivot at or below the requested floor."""


class BracketError(NumericalError):
    """A target squared norm lies outside the range reachable by a plane rotation."""


class MajorizationError(TightFrameError):
    """Requested column norms are not majorized by the target spectrum."""


class InfeasibleError(TightFrameError):
    pass


class BudgetError(TightFrameError):
    """A norm sequence ran out of terms before the construction closed."""


class DomainError(TightFrameError, ValueError):
    pass
