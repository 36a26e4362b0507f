from .batch import Batch, BatchBuilder, BatchDescription, consolidate
from .cursor import BatchCursor, CursorList, WorkCounters
from .merge import InProgressMerge
from .spine import DEFAULT_MERGE_EFFORT, FUEL_FLOOR, MergeEffort, Trace
from .update import Update, encode, fnv1a, route

__all__ = [
    "Batch",
    "BatchBuilder",
    "BatchDescription",
    "consolidate",
    "BatchCursor",
    "CursorList",
    "WorkCounters",
    "InProgressMerge",
    "DEFAULT_MERGE_EFFORT",
    "FUEL_FLOOR",
    "MergeEffort",
    "Trace",
    "Update",
    "encode",
    "fnv1a",
    "route",
]
