"""Exception and warning types raised across the library."""


class KaczlabError(Exception):
    """Base class for all library errors."""


class MeasureError(KaczlabError, ValueError):
    """An atomic measure failed validation."""


class WeightSumError(MeasureError):
    pass


class DuplicateAtomError(MeasureError):
    pass


class RangeError(MeasureError):
    pass


class DomainError(KaczlabError, ValueError):
    """An argument lies outside the domain of the operation (e.g. |z| >= 1)."""


class DimensionError(KaczlabError, ValueError):
    pass


class DepthError(KaczlabError, ValueError):
    """A supplied series is too short for the requested truncation."""


class NumericalError(KaczlabError, ArithmeticError):
    pass


class RankError(KaczlabError, ArithmeticError):
    """A truncated linear system is degenerate."""


class RankWarning(UserWarning):
    """The least-squares system is rank deficient; a minimum-norm solution is returned."""


class NonConvergenceWarning(UserWarning):
    """An iteration hit its cycle cap before meeting its tolerance."""


class ConfigError(KaczlabError, ValueError):
    """Experiment configuration is malformed or has unknown keys."""
