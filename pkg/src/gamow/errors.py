"""Exception types raised by the numerical routines."""


class GamowError(Exception):
    """Base class for all errors raised by this package."""


class NotContractive(GamowError):
    """The resonance fixed-point map is not a contraction for this index."""


class NoConvergence(GamowError):
    """An iteration exceeded its budget before meeting the tolerance."""


class DivisionAtZero(GamowError, ZeroDivisionError):
    """Jost functions are singular at k = 0."""


class OutOfLaurentRange(GamowError):
    """Index outside the range where the Laurent expansion converges."""


class OutOfWindow(GamowError):
    """Wavenumber outside the interval around the resonance."""


class ChannelMismatch(GamowError):
    """Parity of a state disagrees with the requested channel."""


class QuadratureBudgetExceeded(GamowError):
    """The oscillation rule asks for more panels than allowed."""


class NonpositiveTime(GamowError):
    pass


class GridMismatch(GamowError):
    pass


class EmptyWindow(GamowError):
    pass


class NonpositiveValues(GamowError):
    pass


class InsufficientTail(GamowError):
    pass


class ConfigError(GamowError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ReflectionRisk(UserWarning):
    """Box too small: waves reflected at the walls may re-enter the window."""
