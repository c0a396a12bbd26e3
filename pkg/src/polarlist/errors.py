"""Exception types raised across the package."""


class PolarError(ValueError):
    """Base class for invalid codes, configurations and inputs."""


class NonPowerOfTwoN(PolarError):
    pass


class NonPowerOfTwoLength(PolarError):
    pass


class FrozenCountMismatch(PolarError):
    pass


class PunctureLengthMismatch(PolarError):
    pass


class InvalidDesignParameter(PolarError):
    pass


class LengthMismatch(PolarError):
    pass


class InfoLengthMismatch(PolarError):
    pass


class ParseError(PolarError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidListSize(PolarError):
    pass


class MissingCrc(PolarError):
    pass


class NoFreeSlot(PolarError):
    pass


class LengthTooSmall(PolarError):
    pass


class InvalidPruning(PolarError):
    pass
