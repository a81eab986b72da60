"""Exception hierarchy shared across the toolkit."""


class FsmwmError(Exception):
    """Base class for all toolkit errors."""


class SyntaxError_(FsmwmError):
    """Malformed interchange document; carries a position when known."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SemanticError(FsmwmError):
    """Well-formed document violating a machine invariant."""


class DimensionError(FsmwmError):
    """Matrix / key / root dimension mismatch."""


class HaltError(FsmwmError):
    """Step attempted on an undefined (state, input) pair."""


class HashCollisionError(FsmwmError):
    """Two branch states hashed to the same id; widen z."""


class PartitionError(FsmwmError):
    """Partition does not satisfy the required property."""


class IncompatibleBlocksError(FsmwmError):
    """Block intersection empty where a unique common state was required."""


class CapExceededError(FsmwmError):
    """Machine too large for exhaustive lattice search."""


class NoNontrivialDecompositionError(FsmwmError):
    """Only trivial orthogonal pairs exist for this machine."""


class AlphabetMismatchError(FsmwmError):
    """Cascade or comparison attempted across incompatible alphabets."""


class InconsistentTranscriptError(FsmwmError):
    """Observed I/O log implies two different outputs for one situation."""
