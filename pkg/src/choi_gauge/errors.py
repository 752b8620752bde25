"""Exception hierarchy shared by every module."""


class ChoiGaugeError(ValueError):
    """Base class for all input and contract violations."""


class NonSquare(ChoiGaugeError):
    pass


class NonHermitian(ChoiGaugeError):
    pass


class BadDimension(ChoiGaugeError):
    pass


class DimensionMismatch(ChoiGaugeError):
    pass


class NotCanonicalLabel(ChoiGaugeError):
    pass


class SingularGram(ChoiGaugeError):
    pass


class BadState(ChoiGaugeError):
    pass


class BadPulseCount(ChoiGaugeError):
    pass


class IncompleteTable(ChoiGaugeError):
    pass


class ZeroShots(ChoiGaugeError):
    pass


class ZeroVector(ChoiGaugeError):
    pass


class UnknownFixture(ChoiGaugeError):
    pass


class FormatError(ChoiGaugeError):
    """Malformed counts/Choi/witness file; message names the row or field."""
