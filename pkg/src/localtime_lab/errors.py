"""Exception hierarchy shared by all modules."""


class LocalTimeLabError(ValueError):
    """Base class for contract violations raised by this package."""


class InvalidCode(LocalTimeLabError):
    pass


class NotInClass(LocalTimeLabError):
    pass


class OutOfDomain(LocalTimeLabError):
    pass


class InvalidIndex(LocalTimeLabError):
    pass


class IncompleteSamples(LocalTimeLabError):
    pass


class LevelOverflow(LocalTimeLabError):
    pass


class InvalidLength(LocalTimeLabError):
    pass


class TooShort(LocalTimeLabError):
    pass


class InvalidInterval(LocalTimeLabError):
    pass


class InvalidEpsilon(LocalTimeLabError):
    pass


class InvalidPath(LocalTimeLabError):
    pass


class TooFewSamples(LocalTimeLabError):
    pass


class ConfigError(LocalTimeLabError):
    """Bad experiment configuration; ``field`` names the offending key."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or field)
