"""Exception hierarchy shared by all modules."""


class ThreewayError(Exception):
    """Base class for every error raised by this package."""


class EdgeListParseError(ThreewayError, ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ConfigurationError(ThreewayError, ValueError):
    """Invalid engine, grid or experiment configuration."""


class JobError(ThreewayError):
    """A map or reduce function raised; ``key`` identifies the offending record or group."""

    def __init__(self, phase, key, cause):
        super().__init__(f"{phase} failed on key {key!r}: {cause!r}")
        self.phase = phase
        self.key = key
        self.cause = cause


class SkewError(ThreewayError):
    """A reduce group or a planned run exceeded the configured record cap."""

    def __init__(self, message, size=None, cap=None):
        super().__init__(message)
        self.size = size
        self.cap = cap


class WeightOverflowError(ThreewayError, ArithmeticError):
    pass


class CostInvariantError(ThreewayError, ValueError):
    pass


class IntegrityError(ThreewayError):
    pass
