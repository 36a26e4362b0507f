"""Immutable indexed batches of updates

A batch stores its updates in columns sorted by (key, val, time): a list of
distinct keys with offsets into a list of values, and a list of values with
offsets into the parallel time and diff columns.
"""

from dataclasses import dataclass
from itertools import groupby
from operator import itemgetter
from typing import Any, Iterable, Iterator, Optional

from loguru import logger

from shared_arrangements.errors import BatchBoundsError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.compaction import rep
from shared_arrangements.lattice.time import Time, TimeShape
from shared_arrangements.trace.update import Update, checked_add

__all__ = ["Batch", "BatchBuilder", "BatchDescription", "ColumnBuilder", "consolidate"]


@dataclass(frozen=True, slots=True)
class BatchDescription:
    lower: Antichain
    upper: Antichain
    since: Antichain


def consolidate_history(history: Iterable[tuple[Time, int]], since: Antichain) -> list[tuple[Time, int]]:
    """Advance times by ``since``, sum equal times, drop zeros; sorted by time"""
    totals: dict[Time, int] = {}
    for t, d in history:
        if since:
            t = rep(since, t)
        totals[t] = checked_add(totals.get(t, 0), d)
    return sorted((t, d) for t, d in totals.items() if d != 0)


def consolidate(updates: Iterable[Update], since: Antichain) -> list[Update]:
    """Replace times by their representative under ``since`` and coalesce"""
    if since:
        updates = (Update(k, v, rep(since, t), d) for k, v, t, d in updates)
    result: list[Update] = []
    for (k, v, t), group in groupby(sorted(updates, key=itemgetter(0, 1, 2)), key=itemgetter(0, 1, 2)):
        total = 0
        for u in group:
            total = checked_add(total, u.diff)
        if total != 0:
            result.append(Update(k, v, t, total))
    return result


class ColumnBuilder:
    """Appends sorted (key, val, history) groups into batch columns"""

    __slots__ = ("keys", "key_offs", "vals", "val_offs", "times", "diffs")

    def __init__(self) -> None:
        self.keys: list[Any] = []
        self.key_offs: list[int] = [0]
        self.vals: list[Any] = []
        self.val_offs: list[int] = [0]
        self.times: list[Time] = []
        self.diffs: list[int] = []

    def push_group(self, key: Any, val: Any, history: list[tuple[Time, int]]) -> None:
        if not history:
            return
        if not self.keys or self.keys[-1] != key:
            if self.keys:
                self.key_offs.append(len(self.vals))
            self.keys.append(key)
        self.vals.append(val)
        for t, d in history:
            self.times.append(t)
            self.diffs.append(d)
        self.val_offs.append(len(self.times))

    def __len__(self) -> int:
        return len(self.times)

    def done(self, description: BatchDescription) -> "Batch":
        if self.keys:
            self.key_offs.append(len(self.vals))
        return Batch(description, self.keys, self.key_offs, self.vals, self.val_offs, self.times, self.diffs)


class Batch:
    """Immutable, sorted, consolidated block of updates between two frontiers"""

    __slots__ = ("description", "keys", "key_offs", "vals", "val_offs", "times", "diffs")

    def __init__(
        self,
        description: BatchDescription,
        keys: list[Any],
        key_offs: list[int],
        vals: list[Any],
        val_offs: list[int],
        times: list[Time],
        diffs: list[int],
    ) -> None:
        self.description = description
        self.keys = keys
        self.key_offs = key_offs
        self.vals = vals
        self.val_offs = val_offs
        self.times = times
        self.diffs = diffs

    @classmethod
    def empty(cls, lower: Antichain, upper: Antichain, since: Antichain) -> "Batch":
        return ColumnBuilder().done(BatchDescription(lower, upper, since))

    @classmethod
    def from_consolidated(cls, updates: list[Update], description: BatchDescription) -> "Batch":
        builder = ColumnBuilder()
        for (k, v), group in groupby(updates, key=itemgetter(0, 1)):
            builder.push_group(k, v, [(u.time, u.diff) for u in group])
        return builder.done(description)

    @property
    def lower(self) -> Antichain:
        return self.description.lower

    @property
    def upper(self) -> Antichain:
        return self.description.upper

    @property
    def since(self) -> Antichain:
        return self.description.since

    def __len__(self) -> int:
        return len(self.times)

    def is_empty(self) -> bool:
        return not self.times

    def updates(self) -> Iterator[Update]:
        keys, key_offs, vals, val_offs, times, diffs = (
            self.keys, self.key_offs, self.vals, self.val_offs, self.times, self.diffs,
        )
        for ki, key in enumerate(keys):
            for vi in range(key_offs[ki], key_offs[ki + 1]):
                val = vals[vi]
                for i in range(val_offs[vi], val_offs[vi + 1]):
                    yield Update(key, val, times[i], diffs[i])

    def update_times(self) -> Antichain:
        """The minimal times present in the batch"""
        return Antichain(set(self.times))

    def cursor(self, counters=None):
        from shared_arrangements.trace.cursor import BatchCursor

        return BatchCursor(self, counters)

    def __repr__(self) -> str:
        d = self.description
        return f"Batch(lower={d.lower}, upper={d.upper}, since={d.since}, len={len(self)})"


class BatchBuilder:
    """Stages updates and seals them into a Batch"""

    def __init__(self, shape: TimeShape = int) -> None:
        self.shape = shape
        self.staged: list[Update] = []

    def push(self, update: Update) -> "BatchBuilder":
        self.staged.append(update)
        return self

    def extend(self, updates: Iterable[Update]) -> "BatchBuilder":
        self.staged.extend(updates)
        return self

    def __len__(self) -> int:
        return len(self.staged)

    def seal(self, lower: Antichain, upper: Antichain, since: Optional[Antichain] = None) -> Batch:
        for u in self.staged:
            if not lower.less_equal(u.time) or upper.less_equal(u.time):
                raise BatchBoundsError(f"update {u} lies outside [{lower}, {upper})")
        if since is None:
            since = Antichain.minimum(self.shape)
        updates = consolidate(self.staged, Antichain.empty())
        self.staged = []
        batch = Batch.from_consolidated(updates, BatchDescription(lower, upper, since))
        logger.debug(f"sealed {batch}")
        return batch
