"""Arrangement wrappers that re-present a trace without copying it

A view filters (key, val) pairs, maps times into a nested scope, or both, as
the data is navigated. Views expose the batch, cursor and handle interfaces of
what they wrap, so operators consume them like any other arrangement.
"""

from typing import Any, Callable, Iterator, Optional

from shared_arrangements.arrangement.handle import TraceHandle, TraceReader
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Product, Time, TimeShape, enter_time, leave_time
from shared_arrangements.trace.cursor import WorkCounters
from shared_arrangements.trace.update import Update

__all__ = ["BatchView", "CursorView", "HandleView", "TimeMapping"]

Predicate = Callable[[Any, Any], bool]


class TimeMapping:
    """Maps times into a view and frontiers back out of it"""

    def __init__(self, into: Callable[[Time], Time], out_of: Callable[[Time], Time], shape: TimeShape) -> None:
        self.into = into
        self.out_of = out_of
        self.shape = shape

    def frontier_into(self, frontier: Antichain) -> Antichain:
        return frontier.map(self.into)

    def frontier_out_of(self, frontier: Antichain) -> Antichain:
        return frontier.map(self.out_of)


ENTER = TimeMapping(enter_time, leave_time, Product)  # type: ignore[arg-type]


class CursorView:
    def __init__(self, inner: Any, mapping: Optional[TimeMapping], predicate: Optional[Predicate]) -> None:
        self.inner = inner
        self.mapping = mapping
        self.predicate = predicate
        self._settled = False

    def _skip_vals(self) -> None:
        inner, predicate = self.inner, self.predicate
        if predicate is None:
            return
        key = inner.key()
        while inner.val_valid() and not predicate(key, inner.val()):
            inner.step_val()

    def _settle(self) -> None:
        inner = self.inner
        while inner.key_valid():
            self._skip_vals()
            if inner.val_valid():
                break
            inner.step_key()
        self._settled = True

    def key_valid(self) -> bool:
        if not self._settled:
            self._settle()
        return self.inner.key_valid()

    def val_valid(self) -> bool:
        if not self.inner.key_valid():
            return False
        self._skip_vals()
        return self.inner.val_valid()

    def key(self) -> Any:
        return self.inner.key()

    def val(self) -> Any:
        return self.inner.val()

    def step_key(self) -> None:
        self.inner.step_key()
        self._settled = False

    def seek_key(self, key: Any) -> None:
        self.inner.seek_key(key)
        self._settled = False

    def step_val(self) -> None:
        self.inner.step_val()

    def seek_val(self, val: Any) -> None:
        self.inner.seek_val(val)

    def rewind_keys(self) -> None:
        self.inner.rewind_keys()
        self._settled = False

    def rewind_vals(self) -> None:
        self.inner.rewind_vals()

    def history(self) -> list[tuple[Time, int]]:
        history = self.inner.history()
        if self.mapping is None:
            return history
        into = self.mapping.into
        return [(into(t), d) for t, d in history]

    def map_times(self, logic: Callable[[Time, int], None]) -> None:
        for t, d in self.history():
            logic(t, d)


class BatchView:
    """A batch seen through a filter and/or a time mapping"""

    def __init__(self, batch: Any, mapping: Optional[TimeMapping], predicate: Optional[Predicate]) -> None:
        self.batch = batch
        self.mapping = mapping
        self.predicate = predicate

    @property
    def lower(self) -> Antichain:
        lower = self.batch.lower
        return lower if self.mapping is None else self.mapping.frontier_into(lower)

    @property
    def upper(self) -> Antichain:
        upper = self.batch.upper
        return upper if self.mapping is None else self.mapping.frontier_into(upper)

    def cursor(self, counters: Optional[WorkCounters] = None) -> CursorView:
        return CursorView(self.batch.cursor(counters), self.mapping, self.predicate)

    def updates(self) -> Iterator[Update]:
        predicate, mapping = self.predicate, self.mapping
        for u in self.batch.updates():
            if predicate is not None and not predicate(u.key, u.val):
                continue
            yield u if mapping is None else Update(u.key, u.val, mapping.into(u.time), u.diff)

    def update_times(self) -> Antichain:
        return Antichain({u.time for u in self.updates()})

    def is_empty(self) -> bool:
        return next(self.updates(), None) is None

    def __len__(self) -> int:
        return sum(1 for _ in self.updates())

    def __repr__(self) -> str:
        return f"BatchView({self.batch!r})"


class HandleView(TraceReader):
    """A trace handle seen through a filter and/or a time mapping"""

    def __init__(
        self, inner: TraceHandle, mapping: Optional[TimeMapping] = None, predicate: Optional[Predicate] = None
    ) -> None:
        self.inner = inner
        self.mapping = mapping
        self.predicate = predicate
        self.shape = inner.shape if mapping is None else mapping.shape

    @property
    def trace(self):
        return self.inner.trace

    @property
    def worker_index(self) -> int:
        return self.inner.worker_index

    @property
    def dropped(self) -> bool:
        return self.inner.dropped

    def _into(self, frontier: Antichain) -> Antichain:
        return frontier if self.mapping is None else self.mapping.frontier_into(frontier)

    def _out_of(self, frontier: Antichain) -> Antichain:
        return frontier if self.mapping is None else self.mapping.frontier_out_of(frontier)

    @property
    def since(self) -> Antichain:
        return self._into(self.inner.since)

    @property
    def through(self) -> Antichain:
        return self._into(self.inner.through)

    @property
    def upper(self) -> Antichain:
        return self._into(self.inner.upper)

    def set_since(self, frontier: Antichain) -> None:
        self.inner.set_since(self._out_of(frontier))

    def set_through(self, frontier: Antichain) -> None:
        self.inner.set_through(self._out_of(frontier))

    def clone(self, through: Optional[Antichain] = None) -> "HandleView":
        inner = self.inner.clone(None if through is None else self._out_of(through))
        return HandleView(inner, self.mapping, self.predicate)

    def drop(self) -> None:
        self.inner.drop()

    def cursor(self, counters: Optional[WorkCounters] = None) -> CursorView:
        return CursorView(self.inner.cursor(counters), self.mapping, self.predicate)

    def cursor_through(self, frontier: Antichain, counters: Optional[WorkCounters] = None) -> CursorView:
        return CursorView(self.inner.cursor_through(self._out_of(frontier), counters), self.mapping, self.predicate)

    def __repr__(self) -> str:
        return f"HandleView({self.inner!r})"
