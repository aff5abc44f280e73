"""Exception types raised by :mod:`opaherald`."""


class OpaHeraldError(Exception):
    """Base class for all package errors."""


class NumericalError(OpaHeraldError):
    """A computation could not be carried out to the requested accuracy."""


class TruncationTooSmall(NumericalError):
    """Probability mass leaked past the top of the truncated Fock space."""


class NonConvergent(NumericalError):
    """A power series did not terminate within the allowed number of terms."""


class DimensionMismatch(OpaHeraldError, ValueError):
    pass


class DimensionTooLarge(OpaHeraldError, ValueError):
    pass


class ZeroProbability(NumericalError):
    """The requested heralding outcome has (numerically) zero probability."""


class InvalidGain(OpaHeraldError, ValueError):
    pass


class InvalidAmplitude(OpaHeraldError, ValueError):
    pass


class InvalidModel(OpaHeraldError, ValueError):
    pass
