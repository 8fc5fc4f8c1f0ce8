"""Exception hierarchy shared by every module.

``ApfreeError`` subclasses are domain errors (CLI exit status 1).
Usage and I/O problems are reported through the standard ``ValueError``
and ``OSError`` paths instead.
"""


class ApfreeError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidP(ApfreeError, ValueError):
    """Progression length below 3."""


class InvalidCount(ApfreeError, ValueError):
    pass


class ElementOverflow(ApfreeError, OverflowError):
    """An element exceeds the documented 64-bit limit (``core.MAX_ELEMENT``)."""


class NotAnExtension(ApfreeError, ValueError):
    """The candidate is not larger than every member of the set."""


class PreconditionViolated(ApfreeError, ValueError):
    pass


class NotApFree(ApfreeError, ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ClaimViolated(ApfreeError):
    """A set that the construction guarantees to be AP-free contains a progression.

    Never expected to be raised; if it is, ``witness`` is a counterexample.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ExactnessBudgetExceeded(ApfreeError):
    pass


class IndexOutOfRange(ApfreeError, IndexError):
    pass


class AmplifierTooSmall(ApfreeError, ValueError):
    pass


class BelowRange(ApfreeError, ValueError):
    pass


class TooLargeForExhaustive(ApfreeError, ValueError):
    pass


class HorizonExceeded(ApfreeError):
    pass


class NotConvergedAtHorizon(ApfreeError):
    pass


class TailNotSmall(ApfreeError):
    pass


class SequenceFormatError(ApfreeError, ValueError):
    """Malformed sequence text; the message names the offending line."""

    def __init__(self, message, lineno=None):
        super().__init__(message)
        self.lineno = lineno
