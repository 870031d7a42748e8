"""Exception hierarchy shared by all qpart modules."""


class QpartError(Exception):
    """Base class for input errors raised by qpart."""


class ParseError(QpartError):
    pass


class UnsupportedGate(QpartError):
    pass


class QubitIndexError(QpartError, IndexError):
    pass


class SumMismatch(QpartError, ValueError):
    pass


class InvalidSize(QpartError, ValueError):
    pass


class CapacityError(QpartError, ValueError):
    pass


class TooLarge(QpartError, ValueError):
    pass


class ShapeMismatch(QpartError, ValueError):
    pass


class Infeasible(QpartError):
    pass


class Impossible(QpartError, ValueError):
    pass
