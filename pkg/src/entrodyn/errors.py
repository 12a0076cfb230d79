"""Exception hierarchy shared by all entrodyn modules."""


class EntrodynError(Exception):
    """Base class for every error raised by the package."""


class DomainError(EntrodynError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ZeroMass(EntrodynError, ValueError):
    pass


class GridTooNarrow(EntrodynError, ValueError):
    pass


class GridTooCoarse(EntrodynError, ValueError):
    """Grid spacing too large for the drift (cell Peclet number >= 2)."""


class ResolutionTooFine(EntrodynError, ValueError):
    pass


class SupportMismatch(EntrodynError, ValueError):
    pass


class Instability(EntrodynError, ArithmeticError):
    pass


class MissingPotential(EntrodynError, ValueError):
    pass


class NotNormalizable(EntrodynError, ValueError):
    pass


class AliasingDetected(EntrodynError, ValueError):
    pass
