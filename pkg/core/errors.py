class QSPLayerError(Exception):
    """Base class for every error raised by the qsplayer core."""


class InvalidInput(QSPLayerError):
    pass


class GridError(InvalidInput):
    """Grid size is not a power of two or is below the minimum."""


class GridTooCoarse(InvalidInput):
    """Sequence support does not fit the grid without aliasing."""


class GridMismatch(InvalidInput):
    pass


class NonRealInput(InvalidInput):
    pass


class NonUnimodularFactor(InvalidInput):
    pass


class OracleTooLarge(InvalidInput):
    pass


class DegreeOutOfRange(InvalidInput):
    pass


class PhaseOutOfRange(InvalidInput):
    pass


class SymmetryViolation(QSPLayerError):
    pass


class InvalidSignal(InvalidInput):
    pass


class SignalTooLarge(InvalidSignal):
    """sup |f| (or sup |b|) exceeds the 2^(-1/2) - epsilon threshold."""


class FormatError(InvalidInput):
    """Malformed or unsupported phase/signal file."""


class NumericalError(QSPLayerError):
    pass


class NoConvergence(NumericalError):
    pass


class ContractionBroken(NumericalError):
    pass


class DegenerateA(NumericalError):
    pass


class TailNotDecaying(NumericalError):
    pass


class PlancherelViolation(NumericalError):
    pass


class NonPositiveAInfinity(NumericalError):
    pass
