"""Reader handles on a shared trace

A handle registers a reader with the trace. Its ``since`` bounds the times at
which the reader needs correct accumulations, its ``through`` the batches it
has acknowledged. Handles are worker-local and owned by one reader; clone a
handle to share the trace with another reader.
"""

from collections import Counter
from typing import TYPE_CHECKING, Any, Optional

from shared_arrangements.errors import HandleDroppedError, InvalidReadError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Time, TimeShape, less_equal
from shared_arrangements.trace.cursor import WorkCounters
from shared_arrangements.trace.spine import Trace

if TYPE_CHECKING:
    from shared_arrangements.arrangement.arrange import Arranged
    from shared_arrangements.dataflow.scope import Scope

__all__ = ["TraceReader", "TraceHandle"]


class TraceReader:
    """Reads shared by handles and handle views"""

    shape: TimeShape

    @property
    def since(self) -> Antichain:
        raise NotImplementedError

    @property
    def upper(self) -> Antichain:
        raise NotImplementedError

    def cursor(self, counters: Optional[WorkCounters] = None) -> Any:
        raise NotImplementedError

    def check_read(self, t: Time) -> None:
        since, upper = self.since, self.upper
        if not since.less_equal(t) or upper.less_equal(t):
            raise InvalidReadError(
                f"cannot read at {t!r}: reads must lie beyond since {since} and before upper {upper}"
            )

    def read_accumulation(self, key: Any, t: Time) -> list[tuple[Any, int]]:
        """The (val, count) pairs of ``key`` accumulated at ``t``, zero counts omitted"""
        self.check_read(t)
        cursor = self.cursor()
        cursor.seek_key(key)
        if not cursor.key_valid() or cursor.key() != key:
            return []
        result = []
        while cursor.val_valid():
            total = sum(d for time, d in cursor.history() if less_equal(time, t))
            if total != 0:
                result.append((cursor.val(), total))
            cursor.step_val()
        return result

    def read_collection(self, t: Time) -> list[tuple[Any, Any, int]]:
        """Every (key, val, count) accumulated at ``t``"""
        self.check_read(t)
        cursor = self.cursor()
        result = []
        while cursor.key_valid():
            key = cursor.key()
            totals: Counter = Counter()
            while cursor.val_valid():
                totals[cursor.val()] += sum(d for time, d in cursor.history() if less_equal(time, t))
                cursor.step_val()
            result.extend((key, val, count) for val, count in totals.items() if count != 0)
            cursor.step_key()
        return result


class TraceHandle(TraceReader):
    def __init__(
        self,
        trace: Trace,
        worker_index: int,
        since: Optional[Antichain] = None,
        through: Optional[Antichain] = None,
    ) -> None:
        self.trace = trace
        self.shape = trace.shape
        self.worker_index = worker_index
        # an unacknowledging reader places no bound on merging
        self._reader: Optional[int] = trace.register_reader(
            since, through if through is not None else Antichain.empty()
        )

    def _live(self) -> int:
        if self._reader is None:
            raise HandleDroppedError(f"{self.trace.name}: handle has been dropped")
        return self._reader

    @property
    def dropped(self) -> bool:
        return self._reader is None

    @property
    def since(self) -> Antichain:
        return self.trace.reader_since(self._live())

    @property
    def through(self) -> Antichain:
        return self.trace.reader_through(self._live())

    @property
    def upper(self) -> Antichain:
        self._live()
        return self.trace.upper

    def set_since(self, frontier: Antichain) -> None:
        self.trace.set_reader_since(self._live(), frontier)

    def set_through(self, frontier: Antichain) -> None:
        self.trace.set_reader_through(self._live(), frontier)

    def clone(self, through: Optional[Antichain] = None) -> "TraceHandle":
        """A new reader starting from this handle's since"""
        reader = self._live()
        return TraceHandle(
            self.trace,
            self.worker_index,
            since=self.trace.reader_since(reader),
            through=through if through is not None else self.trace.reader_through(reader),
        )

    def drop(self) -> None:
        if self._reader is not None:
            self.trace.unregister_reader(self._reader)
            self._reader = None

    def cursor(self, counters: Optional[WorkCounters] = None):
        self._live()
        return self.trace.cursor(counters)

    def cursor_through(self, frontier: Antichain, counters: Optional[WorkCounters] = None):
        self._live()
        return self.trace.cursor_through(frontier, counters)

    def import_into(self, scope: "Scope", name: Optional[str] = None) -> "Arranged":
        """Mirrors the trace into another dataflow on the owning worker"""
        from shared_arrangements.arrangement.importer import import_trace

        self._live()
        return import_trace(self, scope, name or f"import({self.trace.name})")

    def __enter__(self) -> "TraceHandle":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.drop()

    def __repr__(self) -> str:
        if self._reader is None:
            return f"TraceHandle({self.trace.name}, dropped)"
        return f"TraceHandle({self.trace.name}, since={self.since}, upper={self.trace.upper})"
