"""Exceptions raised across the package."""


class OlpucError(Exception):
    """Base class for all package errors."""


class TruncationExceeded(OlpucError):
    pass


class OutsideAnnulus(OlpucError):
    pass


class LambdaOnCircle(OlpucError):
    pass


class NoSuchIndex(OlpucError):
    pass


class SizeMismatch(OlpucError):
    pass


class SingularMinor(OlpucError):
    """A leading principal minor vanished; ``level`` is its size."""

    def __init__(self, level: int, message: str = ""):
        self.level = level
        super().__init__(message or f"leading minor of size {level} is singular")


class IndexOutOfRange(OlpucError):
    pass


class NotPositiveMeasure(OlpucError):
    pass


class OrderingNotCMV(OlpucError):
    pass


class DegenerateDiagonal(OlpucError):
    pass


class OutsideRegion(OlpucError):
    pass


class QuadratureNearCircle(OlpucError):
    pass


class TrustedLengthExhausted(OlpucError):
    pass


class ParseError(OlpucError):
    pass
