"""
Error types raised across posekit.

Every class derives from `PoseKitError`, itself a `ValueError`, so code that
guards builder calls with `except ValueError` keeps working. Messages carry the
`[!]` marker used throughout the package.
"""


class PoseKitError(ValueError):
    """Base class of every posekit error."""

    def __init__(self, message: str):
        if not message.startswith("[!]"):
            message = f"[!] {message}"
        super().__init__(message)


class TopologyError(PoseKitError):
    """A skeleton definition breaks one of the tree invariants."""


class CycleDetected(TopologyError):
    pass


class MultipleRoots(TopologyError):
    pass


class OrphanJoint(TopologyError):
    pass


class IndexOutOfRange(PoseKitError):
    pass


class ShapeMismatch(PoseKitError):
    pass


class InsufficientData(PoseKitError):
    pass


class MixedDims(PoseKitError):
    pass


class StatsMismatch(PoseKitError):
    pass


class InvalidPairSet(PoseKitError):
    pass


class KinkProximity(PoseKitError):
    pass


class DegenerateConfiguration(PoseKitError):
    pass


class InsufficientSamplesForSubject(PoseKitError):
    pass


class ZeroLengthBone(PoseKitError):
    pass


class NonPositiveDepth(PoseKitError):
    pass


class InvalidIntrinsics(PoseKitError):
    pass


class InvalidConfig(PoseKitError):
    pass


class DivergenceDetected(PoseKitError):
    pass


class InvariantViolation(PoseKitError):
    """Internal consistency check failed; never caused by user input."""


class MalformedInput(PoseKitError):
    """
    A record in an input file could not be parsed.

    Parameters
    ----------
    path : str
        File the record came from.
    line_number : int
        1-based line number of the offending record (0 for whole-file errors).
    reason : str
        What was wrong with it.
    """

    def __init__(self, path: str, line_number: int, reason: str):
        self.path = str(path)
        self.line_number = line_number
        self.reason = reason
        where = f"{self.path}:{line_number}" if line_number else self.path
        super().__init__(f"[!] Malformed input at {where}: {reason}")
