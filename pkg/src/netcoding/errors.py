"""Exception types shared across the package."""


class NetCodingError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class NotEncodable(NetCodingError):
    pass


class MalformedRep(NetCodingError):
    pass


class NotViolated(NetCodingError):
    pass


class DimensionMismatch(NetCodingError):
    pass


class CoordinateMismatch(NetCodingError):
    pass


class NameClash(NetCodingError):
    pass


class MinSubstitutionUnsafe(NetCodingError):
    pass


class SizeCap(NetCodingError):
    pass


class InvalidElement(NetCodingError):
    pass


class BadMap(NetCodingError):
    pass


class CapTooSmall(NetCodingError):
    pass


class ParseError(Exception):
    """Malformed input file (CLI exit code 2)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
