"""Exception hierarchy shared by all zeroscope modules."""


class ZeroscopeError(Exception):
    pass


class IndecisiveEstimate(ZeroscopeError):
    """Trailing-window growth estimates disagree; ``window`` holds the raw data."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window or {}


class NotEntire(ZeroscopeError):
    pass


class NoDecayObserved(ZeroscopeError):
    pass


class PrecisionExhausted(ZeroscopeError):
    """The requested tolerance is below what the working precision can deliver."""

    def __init__(self, message, suggested_bits=None):
        super().__init__(message)
        self.suggested_bits = suggested_bits


class BranchPoint(ZeroscopeError):
    pass


class BranchCut(ZeroscopeError):
    pass


class RangeBelowDegree(ZeroscopeError):
    pass


class InsufficientData(ZeroscopeError):
    pass


class ContourNearZero(ZeroscopeError):
    pass


class Unresolvable(ZeroscopeError):
    pass


class SubdivisionStall(ZeroscopeError):
    pass
