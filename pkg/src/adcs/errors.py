"""Exception types shared across the package."""
from __future__ import annotations


class AdcsError(Exception):
    """Base class for all package errors."""


class SizeGuardError(AdcsError):
    """Subset enumeration requested beyond the configured node cap."""


class DegreeOverflowError(AdcsError):
    """A node has too many neighbors for the share denominator."""


class ScaleMismatchError(AdcsError):
    """Two potentials (or a potential and params) use different (d, c) scales."""


class InfeasibleParameterError(AdcsError):
    """No parameter bundle satisfies the requested constraints."""


class ScheduleError(AdcsError):
    """Malformed schedule description or a window that is not T-connected."""


class ProtocolViolation(AdcsError):
    """A node received input that cannot occur in a consistent execution."""


class RoundCapExceeded(AdcsError):
    """The simulation hit its round cap before every node terminated."""

    def __init__(self, message: str, rounds: int, trace: list | None = None):
        super().__init__(message)
        self.rounds = rounds
        self.trace = trace if trace is not None else []


class CongestionViolation(AdcsError):
    """A serialized message exceeded its audited bit bound."""

    def __init__(self, message: str, bits: int, bound: int):
        super().__init__(message)
        self.bits = bits
        self.bound = bound
