"""Ordered cursors over batches and over unions of batches

Keys are visited in ascending order and, within a key, values in ascending
order; each (key, val) exposes its (time, diff) history. Seeks gallop forward
from the current position and charge every probe to ``WorkCounters``.
"""

from bisect import bisect_left
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from shared_arrangements.lattice.time import Time
from shared_arrangements.trace.batch import Batch

__all__ = ["BatchCursor", "CursorList", "WorkCounters"]


@dataclass
class WorkCounters:
    """Instrumented work counts of one worker"""

    cursor_steps: int = 0
    merge_work: int = 0
    max_insert_work: int = 0
    join_outputs: int = 0
    reduce_evaluations: int = 0

    def reset(self) -> None:
        self.cursor_steps = 0
        self.merge_work = 0
        self.max_insert_work = 0
        self.join_outputs = 0
        self.reduce_evaluations = 0

    def merged(self, other: "WorkCounters") -> "WorkCounters":
        return WorkCounters(
            cursor_steps=self.cursor_steps + other.cursor_steps,
            merge_work=self.merge_work + other.merge_work,
            max_insert_work=max(self.max_insert_work, other.max_insert_work),
            join_outputs=self.join_outputs + other.join_outputs,
            reduce_evaluations=self.reduce_evaluations + other.reduce_evaluations,
        )


def gallop(items: Sequence[Any], lo: int, hi: int, target: Any, counters: Optional[WorkCounters]) -> int:
    """First index in [lo, hi) whose item is >= target, or hi"""
    if lo >= hi:
        return hi
    if counters is not None:
        counters.cursor_steps += 1
    if items[lo] >= target:
        return lo
    step = 1
    while lo + step < hi and items[lo + step] < target:
        lo += step
        step <<= 1
        if counters is not None:
            counters.cursor_steps += 1
    end = min(lo + step, hi)
    if counters is not None:
        counters.cursor_steps += step.bit_length()
    return bisect_left(items, target, lo + 1, end)


class BatchCursor:
    __slots__ = ("batch", "counters", "_key", "_val", "_val_end")

    def __init__(self, batch: Batch, counters: Optional[WorkCounters] = None) -> None:
        self.batch = batch
        self.counters = counters
        self._key = 0
        self._val = 0
        self._val_end = 0
        self._enter_key()

    def _enter_key(self) -> None:
        b = self.batch
        if self._key < len(b.keys):
            self._val = b.key_offs[self._key]
            self._val_end = b.key_offs[self._key + 1]
        else:
            self._val = self._val_end = 0

    def key_valid(self) -> bool:
        return self._key < len(self.batch.keys)

    def val_valid(self) -> bool:
        return self._val < self._val_end

    def key(self) -> Any:
        return self.batch.keys[self._key]

    def val(self) -> Any:
        return self.batch.vals[self._val]

    def step_key(self) -> None:
        if self.counters is not None:
            self.counters.cursor_steps += 1
        self._key += 1
        self._enter_key()

    def seek_key(self, key: Any) -> None:
        keys = self.batch.keys
        position = gallop(keys, self._key, len(keys), key, self.counters)
        if position != self._key:
            self._key = position
            self._enter_key()

    def step_val(self) -> None:
        if self.counters is not None:
            self.counters.cursor_steps += 1
        self._val += 1

    def seek_val(self, val: Any) -> None:
        self._val = gallop(self.batch.vals, self._val, self._val_end, val, self.counters)

    def rewind_keys(self) -> None:
        self._key = 0
        self._enter_key()

    def rewind_vals(self) -> None:
        self._enter_key()

    def map_times(self, logic: Callable[[Time, int], None]) -> None:
        b = self.batch
        for i in range(b.val_offs[self._val], b.val_offs[self._val + 1]):
            logic(b.times[i], b.diffs[i])

    def history(self) -> list[tuple[Time, int]]:
        b = self.batch
        lo, hi = b.val_offs[self._val], b.val_offs[self._val + 1]
        return list(zip(b.times[lo:hi], b.diffs[lo:hi]))


class CursorList:
    """A merged view over several cursors

    Histories of a (key, val) present in several batches are concatenated in
    batch order.
    """

    def __init__(self, cursors: list[Any]) -> None:
        self.cursors = cursors
        self._at_key: list[Any] = []
        self._at_val: list[Any] = []
        self._tidy_keys()

    def _tidy_keys(self) -> None:
        current = None
        at_key: list[Any] = []
        for c in self.cursors:
            if not c.key_valid():
                continue
            k = c.key()
            if current is None or k < current[0]:
                current = (k,)
                at_key = [c]
            elif k == current[0]:
                at_key.append(c)
        self._at_key = at_key
        self._tidy_vals()

    def _tidy_vals(self) -> None:
        current = None
        at_val: list[Any] = []
        for c in self._at_key:
            if not c.val_valid():
                continue
            v = c.val()
            if current is None or v < current[0]:
                current = (v,)
                at_val = [c]
            elif v == current[0]:
                at_val.append(c)
        self._at_val = at_val

    def key_valid(self) -> bool:
        return bool(self._at_key)

    def val_valid(self) -> bool:
        return bool(self._at_val)

    def key(self) -> Any:
        return self._at_key[0].key()

    def val(self) -> Any:
        return self._at_val[0].val()

    def step_key(self) -> None:
        for c in self._at_key:
            c.step_key()
        self._tidy_keys()

    def seek_key(self, key: Any) -> None:
        for c in self.cursors:
            c.seek_key(key)
        self._tidy_keys()

    def step_val(self) -> None:
        for c in self._at_val:
            c.step_val()
        self._tidy_vals()

    def seek_val(self, val: Any) -> None:
        for c in self._at_key:
            c.seek_val(val)
        self._tidy_vals()

    def rewind_keys(self) -> None:
        for c in self.cursors:
            c.rewind_keys()
        self._tidy_keys()

    def rewind_vals(self) -> None:
        for c in self._at_key:
            c.rewind_vals()
        self._tidy_vals()

    def map_times(self, logic: Callable[[Time, int], None]) -> None:
        for c in self._at_val:
            c.map_times(logic)

    def history(self) -> list[tuple[Time, int]]:
        result: list[tuple[Time, int]] = []
        for c in self._at_val:
            result.extend(c.history())
        return result
