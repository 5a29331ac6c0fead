"""Exception hierarchy shared by all modules."""


class PolaronError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(PolaronError, ValueError):
    pass


class SingularParameterError(InvalidParameterError):
    """Parameters sit on the |zeta| = 1 resonance of the dressed interaction."""


class SingularGeometryError(InvalidParameterError):
    """A displaced bond length hits the resonance denominator."""


class DomainError(InvalidParameterError):
    pass


class DegenerateBandError(InvalidParameterError):
    """The bare hopping amplitude vanishes."""


class CapacityError(PolaronError, OverflowError):
    pass


class BuildError(PolaronError):
    pass


class ConvergenceError(PolaronError, RuntimeError):
    """Iterative solver failed; ``best`` carries the last estimate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoTransitionError(PolaronError):
    pass


class ConfigError(PolaronError, ValueError):
    """Configuration problem; ``key`` names the offending entry when known."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
