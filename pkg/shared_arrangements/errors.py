"""Exceptions raised by the dataflow engine and its harness"""


class DataflowError(Exception):
    """Base class for every error raised by shared_arrangements"""


class TimeShapeError(DataflowError):
    """Two timestamps of different shapes met in one comparison"""


class ScopeError(DataflowError):
    """A collection was used in a scope it does not belong to"""


class BatchBoundsError(DataflowError):
    """A staged update lies outside the bounds of the batch being sealed"""


class DiscontiguousBatchError(DataflowError):
    """A batch's lower frontier does not match the trace's upper frontier"""


class CompactionError(DataflowError):
    """A compaction frontier tried to move backwards"""


class InvalidReadError(DataflowError):
    """A read was requested at a time outside the valid window of a trace"""


class HandleDroppedError(DataflowError):
    """A trace handle was used after it was dropped"""


class CapabilityError(DataflowError):
    """An operator emitted data at a time it holds no capability for"""


class ProgressViolationError(DataflowError):
    """Data arrived at a time the input frontier had already passed"""


class WorkerMismatchError(DataflowError):
    """A worker-local structure was used from another worker"""


class IterationLimitError(DataflowError):
    """An iterative computation failed to converge within the round limit"""


class DiffOverflowError(DataflowError):
    """Accumulated diffs overflowed signed 64-bit arithmetic"""


class NondeterministicLogicError(DataflowError):
    """User logic returned different results for identical arguments"""


class EdgeFileError(DataflowError):
    """An edge file could not be parsed"""

    def __init__(self, path: str, line: int, text: str) -> None:
        super().__init__(f"{path}:{line}: malformed edge line {text!r}")
        self.path = path
        self.line = line
