"""The multiversioned trace: a list of batches kept compact by amortized merging

Batches arrive in contiguous order. Adjacent complete batches whose sizes are
within a factor of two are merged; each insertion funds merge work in
proportion to its size, so the trace settles into geometric size bands and
holds logarithmically many batches.

Readers register two frontiers. ``since`` is the logical compaction frontier:
merges advance times by the meet of all readers' ``since``. ``through`` is the
physical frontier: a batch is not eligible for merging until its upper is at
or before every reader's ``through``, so a reader can always take a cursor
exactly through the batches it has acknowledged.
"""

from collections import deque
from itertools import count
from typing import Callable, Hashable, Optional, Union

from loguru import logger

from shared_arrangements.errors import CompactionError, DiscontiguousBatchError, InvalidReadError
from shared_arrangements.lattice.antichain import Antichain, meet
from shared_arrangements.lattice.time import TimeShape
from shared_arrangements.trace.batch import Batch
from shared_arrangements.trace.cursor import CursorList, WorkCounters
from shared_arrangements.trace.merge import InProgressMerge

__all__ = ["Trace", "MergeEffort", "DEFAULT_MERGE_EFFORT", "FUEL_FLOOR"]

MergeEffort = Optional[int]  # None merges eagerly

DEFAULT_MERGE_EFFORT = 8
FUEL_FLOOR = 32

Slot = Union[Batch, InProgressMerge]


class _Reader:
    __slots__ = ("since", "through")

    def __init__(self, since: Antichain, through: Antichain) -> None:
        self.since = since
        self.through = through


class Trace:
    def __init__(
        self,
        shape: TimeShape = int,
        merge_effort: MergeEffort = DEFAULT_MERGE_EFFORT,
        counters: Optional[WorkCounters] = None,
        name: str = "trace",
        sharding: Optional[Callable] = None,
    ) -> None:
        if merge_effort is not None and merge_effort < 1:
            raise ValueError(f"merge effort must be positive, got {merge_effort}")
        self.shape = shape
        self.name = name
        self.sharding = sharding  # routing key of the writer, None for the update key
        self.merge_effort = merge_effort
        self.counters = counters if counters is not None else WorkCounters()
        self.upper = Antichain.minimum(shape)
        self.since = Antichain.minimum(shape)
        self.released = False
        self.last_insert_work = 0
        self.inserted_batches = 0
        self.writers: set[Hashable] = set()
        self._pending: list[Batch] = []
        self._slots: list[Slot] = []
        self._readers: dict[int, _Reader] = {}
        self._reader_ids = count()
        self._subscribers: list[deque] = []

    # -- readers ---------------------------------------------------------

    def register_reader(self, since: Optional[Antichain] = None, through: Optional[Antichain] = None) -> int:
        reader_id = next(self._reader_ids)
        since = since if since is not None and since.dominates(self.since) else self.since
        through = through if through is not None else self.upper
        self._readers[reader_id] = _Reader(since, through)
        logger.debug(f"{self.name}: reader {reader_id} registered at since {since}")
        return reader_id

    def unregister_reader(self, reader_id: int) -> None:
        self._readers.pop(reader_id, None)
        logger.debug(f"{self.name}: reader {reader_id} dropped, {len(self._readers)} remain")
        if not self._readers:
            self.release()
        else:
            self._refresh_since()
            self._admit()

    @property
    def reader_count(self) -> int:
        return len(self._readers)

    def reader_since(self, reader_id: int) -> Antichain:
        return self._readers[reader_id].since

    def reader_through(self, reader_id: int) -> Antichain:
        return self._readers[reader_id].through

    def set_reader_since(self, reader_id: int, frontier: Antichain) -> None:
        reader = self._readers[reader_id]
        if not frontier.dominates(reader.since):
            raise CompactionError(f"{self.name}: reader since cannot retreat from {reader.since} to {frontier}")
        reader.since = frontier
        self._refresh_since()

    def set_reader_through(self, reader_id: int, frontier: Antichain) -> None:
        reader = self._readers[reader_id]
        if frontier.dominates(reader.through):
            reader.through = frontier
            self._admit()

    def _refresh_since(self) -> None:
        frontier = meet(r.since for r in self._readers.values())
        if frontier != self.since and frontier.dominates(self.since):
            self.set_logical_compaction(frontier)

    def physical_frontier(self) -> Antichain:
        return meet(r.through for r in self._readers.values())

    # -- maintenance -----------------------------------------------------

    def set_logical_compaction(self, frontier: Antichain) -> None:
        if frontier == self.since:
            return
        if not frontier.dominates(self.since):
            raise CompactionError(f"{self.name}: since cannot retreat from {self.since} to {frontier}")
        if self._readers:
            held = meet(r.since for r in self._readers.values())
            if not held.dominates(frontier):
                raise CompactionError(f"{self.name}: since {frontier} passes the readers' frontier {held}")
        logger.debug(f"{self.name}: since advanced {self.since} -> {frontier}")
        self.since = frontier

    def insert(self, batch: Batch, writer: Hashable = None) -> None:
        if batch.lower != self.upper:
            raise DiscontiguousBatchError(
                f"{self.name}: batch lower {batch.lower} does not match trace upper {self.upper}"
            )
        self.writers.add(writer)
        self.upper = batch.upper
        self.inserted_batches += 1
        for subscriber in self._subscribers:
            subscriber.append(batch)
        if self.released:
            self.last_insert_work = 0
            return
        self._pending.append(batch)
        self._admit()
        if self.merge_effort is None:
            fuel = None
        else:
            fuel = self.merge_effort * len(batch) + FUEL_FLOOR
        before = self.counters.merge_work
        self._maintain(fuel)
        self.last_insert_work = self.counters.merge_work - before
        self.counters.max_insert_work = max(self.counters.max_insert_work, self.last_insert_work)

    def _admit(self) -> None:
        physical = self.physical_frontier()
        while self._pending and physical.dominates(self._pending[0].upper):
            self._slots.append(self._pending.pop(0))
        self._tidy()

    def _tidy(self) -> None:
        """Starts a merge for every adjacent pair of complete batches within 2x in size"""
        slots = self._slots
        changed = True
        while changed:
            changed = False
            for i in range(len(slots) - 1):
                older, newer = slots[i], slots[i + 1]
                if isinstance(older, Batch) and isinstance(newer, Batch) and len(older) <= 2 * len(newer):
                    merge = InProgressMerge(older, newer, self.since)
                    slots[i : i + 2] = [merge.result if merge.done else merge]
                    changed = True
                    break

    def _maintain(self, fuel: Optional[int]) -> None:
        """Spends ``fuel`` on in-progress merges, newest first; None completes them all"""
        slots = self._slots
        while True:
            progressed = False
            for i in reversed(range(len(slots))):
                merge = slots[i]
                if not isinstance(merge, InProgressMerge):
                    continue
                work_before = merge.work
                if fuel is None:
                    merge.complete()
                elif fuel > 0:
                    fuel = max(merge.step(fuel), 0)
                self.counters.merge_work += merge.work - work_before
                if merge.result is not None:
                    slots[i] = merge.result
                    progressed = True
            if not progressed:
                return
            self._tidy()

    def release(self) -> None:
        """Drops all stored batches; the trace keeps advancing its upper"""
        if not self.released:
            logger.debug(f"{self.name}: no readers remain, releasing storage")
        self.released = True
        self._pending.clear()
        self._slots.clear()

    # -- subscriptions ----------------------------------------------------

    def subscribe(self) -> deque:
        queue: deque = deque()
        self._subscribers.append(queue)
        return queue

    def unsubscribe(self, queue: deque) -> None:
        if queue in self._subscribers:
            self._subscribers.remove(queue)

    # -- reading ---------------------------------------------------------

    def batches(self) -> list[Batch]:
        """Every batch currently readable, oldest first

        In-progress merges contribute their two inputs.
        """
        result: list[Batch] = []
        for slot in self._slots:
            if isinstance(slot, InProgressMerge):
                result.append(slot.older)
                result.append(slot.newer)
            else:
                result.append(slot)
        result.extend(self._pending)
        return result

    def merged_batches(self) -> list[Batch]:
        """The trace in its most merged form, completing in-progress merges"""
        self._maintain(None)
        return self.batches()

    def cursor(self, counters: Optional[WorkCounters] = None) -> CursorList:
        counters = counters if counters is not None else self.counters
        return CursorList([b.cursor(counters) for b in self.batches() if not b.is_empty()])

    def cursor_through(self, frontier: Antichain, counters: Optional[WorkCounters] = None) -> CursorList:
        """A cursor over exactly the batches whose upper is at or before ``frontier``"""
        counters = counters if counters is not None else self.counters
        cursors = []
        for batch in self.batches():
            if frontier.dominates(batch.upper):
                if not batch.is_empty():
                    cursors.append(batch.cursor(counters))
                continue
            if batch.lower != frontier and frontier.dominates(batch.lower):
                raise InvalidReadError(
                    f"{self.name}: batch [{batch.lower}, {batch.upper}) straddles frontier {frontier}"
                )
            break
        return CursorList(cursors)

    def resident_updates(self) -> int:
        return sum(len(s) for s in self._slots) + sum(len(b) for b in self._pending)

    def resident_batches(self) -> int:
        return len(self._slots) + len(self._pending)

    def __repr__(self) -> str:
        return (
            f"Trace({self.name}, since={self.since}, upper={self.upper}, "
            f"batches={self.resident_batches()}, updates={self.resident_updates()})"
        )
