from typing import Optional

from loguru import logger

from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.trace.batch import Batch, BatchDescription, ColumnBuilder, consolidate_history

__all__ = ["InProgressMerge"]


class _GroupReader:
    """Walks the (key, val) groups of one batch in order"""

    __slots__ = ("batch", "key_index", "val_index")

    def __init__(self, batch: Batch) -> None:
        self.batch = batch
        self.key_index = 0
        self.val_index = 0

    def valid(self) -> bool:
        return self.val_index < len(self.batch.vals)

    def head(self) -> tuple:
        b = self.batch
        return b.keys[self.key_index], b.vals[self.val_index]

    def take(self) -> list:
        b = self.batch
        lo, hi = b.val_offs[self.val_index], b.val_offs[self.val_index + 1]
        history = list(zip(b.times[lo:hi], b.diffs[lo:hi]))
        self.val_index += 1
        if self.val_index == b.key_offs[self.key_index + 1]:
            self.key_index += 1
        return history


class InProgressMerge:
    """A resumable merge of two adjacent batches

    One unit of fuel is one update examined. Work proceeds a whole (key, val)
    group at a time, so a step may overrun its fuel by at most one group.
    Times are advanced by the ``since`` frontier captured when the merge began.
    """

    def __init__(self, older: Batch, newer: Batch, since: Antichain) -> None:
        self.older = older
        self.newer = newer
        self.since = since
        self.work = 0
        self.result: Optional[Batch] = None
        self._left = _GroupReader(older)
        self._right = _GroupReader(newer)
        self._builder = ColumnBuilder()
        self._description = BatchDescription(older.lower, newer.upper, since)
        logger.debug(f"merge started: {len(older)} + {len(newer)} updates under since {since}")
        self._finish_if_done()

    @property
    def done(self) -> bool:
        return self.result is not None

    def __len__(self) -> int:
        """Resident updates held by the merge: both inputs and the partial output"""
        if self.result is not None:
            return len(self.result)
        return len(self.older) + len(self.newer) + len(self._builder)

    @property
    def remaining(self) -> int:
        return len(self.older) + len(self.newer) - self.work

    def _finish_if_done(self) -> None:
        if self.result is None and not self._left.valid() and not self._right.valid():
            self.result = self._builder.done(self._description)
            logger.debug(f"merge completed: {self.result} after {self.work} units")

    def step(self, fuel: int) -> int:
        """Performs up to ``fuel`` units of work and returns the fuel left over"""
        left, right, builder, since = self._left, self._right, self._builder, self.since
        while self.result is None and fuel > 0:
            if left.valid() and right.valid():
                lk, rk = left.head(), right.head()
                if lk < rk:
                    key, history = lk, left.take()
                elif rk < lk:
                    key, history = rk, right.take()
                else:
                    key, history = lk, left.take() + right.take()
            elif left.valid():
                key, history = left.head(), left.take()
            else:
                key, history = right.head(), right.take()
            builder.push_group(key[0], key[1], consolidate_history(history, since))
            self.work += len(history)
            fuel -= len(history)
            self._finish_if_done()
        return fuel

    def complete(self) -> Batch:
        """Runs the merge to completion"""
        while self.result is None:
            self.step(max(self.remaining, 1))
        return self.result
