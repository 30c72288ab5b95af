"""Exception types raised across the package."""


class EntlockError(Exception):
    """Base class for all package errors."""


class NotHermitian(EntlockError, ValueError):
    pass


class DimMismatch(EntlockError, ValueError):
    pass


class BadShape(EntlockError, ValueError):
    pass


class NotAState(EntlockError, ValueError):
    pass


class NotIsometry(EntlockError, ValueError):
    pass


class RankTooLarge(EntlockError, ValueError):
    pass


class OptimizerDiverged(EntlockError, RuntimeError):
    """Every restart of a local search failed its line search."""
