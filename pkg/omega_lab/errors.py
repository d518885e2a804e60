"""
Exception hierarchy for omega-lab.

`InputError` and its subclasses describe bad input (exit status 2 on the
command line); every other `OmegaLabError` is operational (exit status 1).
"""

from typing import TYPE_CHECKING, Tuple

if TYPE_CHECKING:
    from omega_lab.models.bits import BitString


class OmegaLabError(Exception):
    """Base class for all omega-lab errors."""


class InputError(OmegaLabError, ValueError):
    """Raised when input fails validation."""


class DuplicateMemberError(InputError):
    """Raised when a collection of bitstrings holds the same string twice."""

    def __init__(self, member: "BitString"):
        self.member = member
        super().__init__(f"Duplicate member {member or '(empty)'}")


class PrefixViolationError(InputError):
    """Raised when a set of bitstrings is not prefix-free."""

    def __init__(self, witness: Tuple["BitString", "BitString"]):
        self.witness = witness
        prefix, extension = witness
        super().__init__(f"Not prefix-free: witness ({prefix or '(empty)'}, {extension})")


class OutOfRangeError(InputError):
    """Raised when a value lies outside an operation's domain."""


class ConfigurationError(InputError):
    """Raised when a parameter exceeds a configured bound or settings are invalid."""


class MachineSpecError(InputError):
    """Raised when a machine spec file is malformed."""


class UnsupportedOperationError(InputError):
    """Raised when an operation is requested for a machine that cannot support it."""


class InconsistentOmegaError(InputError):
    """Raised when supplied bits of Omega are provably wrong for the machine."""


class CheckpointMismatchError(InputError):
    """Raised when a checkpoint does not belong to the machine being enumerated."""


class TruncationError(OmegaLabError):
    """Raised when a bit source runs dry in the middle of a codeword."""


class DeciderProtocolError(OmegaLabError):
    """Raised when a halting decider fails to answer a query."""
