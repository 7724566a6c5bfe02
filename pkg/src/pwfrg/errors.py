"""Exception hierarchy shared by all modules."""


class PwfrgError(Exception):
    """Base class for every error raised by this package."""


class NonSymmetric(PwfrgError, ValueError):
    pass


class NonFinite(PwfrgError, ValueError):
    pass


class DimensionMismatch(PwfrgError, ValueError):
    pass


class ZeroStartVector(PwfrgError, ValueError):
    pass


class NoConvergence(PwfrgError, ArithmeticError):
    """Iterative solver ran out of iterations.

    ``best`` carries whatever estimate was available when the solver gave up
    and ``steps`` the per-step records of an interrupted growth run.
    """

    def __init__(self, message, best=None, steps=None):
        super().__init__(message)
        self.best = best
        self.steps = steps if steps is not None else []


class AllSingularValuesCut(PwfrgError, ArithmeticError):
    pass


class OddSystemSize(PwfrgError, ValueError):
    pass


class SiteNotAdjacent(PwfrgError, ValueError):
    pass


class NotNormalized(PwfrgError, ValueError):
    pass


class InvalidDensityMatrix(PwfrgError, ValueError):
    pass


class ZeroNorm(PwfrgError, ArithmeticError):
    """A predicted trial vector vanished (basis mismatch after truncation)."""


class SizeTooLarge(PwfrgError, ValueError):
    pass


class ConfigParse(PwfrgError, ValueError):
    """Bad configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
