"""Exception types shared across the package."""


class FracstabError(Exception):
    """Base class for package-specific errors."""


class ConfigError(FracstabError):
    """Malformed, missing, or inconsistent configuration input."""


class OrderOutOfRange(FracstabError):
    """A derivative order lies outside the supported interval (0, 1]."""


class NonFiniteEntry(FracstabError):
    """A matrix or vector entry is NaN or infinite."""


class BadForcingTable(FracstabError):
    """A forcing term is unusable (unsorted samples, non-finite values,
    or a power-law tail that blows up at its own breakpoint)."""


class BadNonlinearity(FracstabError):
    """A polynomial nonlinearity has a term of total degree < 2 or a
    negative/non-integer exponent."""


class NotReducible(FracstabError):
    """The characteristic function keeps more than three interior terms,
    so no four-term reduced form exists."""


class SineRatiosUndefined(FracstabError):
    """The sine-ratio constants do not exist because the leading exponent
    equals 2 (the normalizing sine vanishes)."""


class ZeroAtOrigin(FracstabError):
    """The characteristic function vanishes at s = 0 (singular matrix)."""


class ZeroOnAxis(FracstabError):
    """A zero of the characteristic function sits on the imaginary axis
    within certification tolerance."""


class SamplingInconclusive(FracstabError):
    """Contour sampling could not certify a winding number within the
    evaluation budget."""


class InternalContradiction(FracstabError):
    """Two applicable criteria produced opposite verdicts."""


class CriterionOracleMismatch(FracstabError):
    """A criterion verdict disagrees with the zero-count oracle."""


class NewtonDivergence(FracstabError):
    """The implicit stage equation could not be solved to tolerance."""


class StepTooLarge(FracstabError):
    """The implicit stage matrix is singular at the requested step size."""


class GridMisaligned(FracstabError):
    """A forcing breakpoint or the end time does not fall on the
    integration grid."""


class LinearPartNotCertified(FracstabError):
    """A basin study was requested around an equilibrium whose linear part
    could not be certified stable."""
