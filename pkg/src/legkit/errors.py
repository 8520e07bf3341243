"""Exception types raised across legkit."""


class LegkitError(Exception):
    """Base class for all legkit failures."""


class SizeMismatch(LegkitError, ValueError):
    pass


class ZeroParameter(LegkitError, ValueError):
    pass


class NotSkew(LegkitError, ValueError):
    pass


class OddSize(LegkitError, ValueError):
    pass


class Unsupported(LegkitError, ValueError):
    pass


class DegenerateSample(LegkitError, RuntimeError):
    """A sampled parameter point kept mapping to zero."""


class InvalidWeights(LegkitError, ValueError):
    pass


class InvalidFlavor(LegkitError, ValueError):
    pass


class NotUnimodular(LegkitError, ValueError):
    pass


class FlavorViolation(LegkitError, ValueError):
    pass


class SingularInput(LegkitError, ValueError):
    pass


class CenterNotOnVariety(LegkitError, ValueError):
    pass


class InvalidRange(LegkitError, ValueError):
    pass


class NoRootFound(LegkitError, RuntimeError):
    pass


class DegenerateSection(LegkitError, RuntimeError):
    pass


class SolverFailed(LegkitError, RuntimeError):
    pass


class NoParametrization(LegkitError, ValueError):
    pass


class InterpolationFailed(LegkitError, RuntimeError):
    """A quadric passed interpolation but failed on fresh samples."""
