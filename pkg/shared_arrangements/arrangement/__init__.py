from shared_arrangements.arrangement.arrange import Arrange, Arranged, arrange
from shared_arrangements.arrangement.handle import TraceHandle, TraceReader
from shared_arrangements.arrangement.importer import Import, import_trace
from shared_arrangements.arrangement.views import BatchView, CursorView, HandleView

__all__ = [
    "Arrange",
    "Arranged",
    "BatchView",
    "CursorView",
    "HandleView",
    "Import",
    "TraceHandle",
    "TraceReader",
    "arrange",
    "import_trace",
]
