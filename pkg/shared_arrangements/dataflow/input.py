"""Dataflow inputs and observation points"""

import threading
from collections import Counter, deque
from typing import Any, Iterable, Optional, Union

from loguru import logger

from shared_arrangements.dataflow.channels import stamp_of
from shared_arrangements.dataflow.operator import Operator
from shared_arrangements.errors import ProgressViolationError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Time, less_equal, less_than, minimum
from shared_arrangements.trace.batch import consolidate
from shared_arrangements.trace.update import Update

__all__ = ["Capture", "InputHandle", "InputOperator", "Probe"]

UpdateLike = Union[Update, tuple[Any, Any, Time, int]]


class InputOperator(Operator):
    """Introduces updates into a dataflow on behalf of an ``InputHandle``

    The handle stages events from the driving thread; the operator replays
    them in order when scheduled.
    """

    def __init__(self, scope, name: str = "input") -> None:
        super().__init__(scope, name, inputs=0, outputs=1)
        self.epoch: Optional[Time] = minimum(scope.shape)
        self.staged: deque[tuple[str, Any]] = deque()
        self.outputs[0].retain([self.epoch])

    def has_work(self) -> bool:
        return bool(self.staged)

    def schedule(self) -> None:
        output = self.outputs[0]
        while self.staged:
            kind, payload = self.staged.popleft()
            if kind == "send":
                output.send(stamp_of(payload), payload)
            elif kind == "advance":
                output.retain([payload])
                output.release([self.epoch])
                self.epoch = payload
            else:
                output.release_all()
                self.epoch = None


class InputHandle:
    """Sends updates into one worker's shard of a dataflow input

    Updates are stamped with the current epoch unless a time is given; a time
    must never precede the epoch, and epochs only advance.
    """

    def __init__(self, operator: InputOperator) -> None:
        self.operator = operator
        self._epoch: Optional[Time] = operator.epoch
        self._buffer: list[Update] = []
        self._lock = threading.Lock()

    @property
    def epoch(self) -> Optional[Time]:
        return self._epoch

    @property
    def closed(self) -> bool:
        return self._epoch is None

    def _check_time(self, time: Time) -> None:
        if self._epoch is None:
            raise ProgressViolationError(f"{self.operator.name}: input is closed, cannot send at {time!r}")
        if not less_equal(self._epoch, time):
            raise ProgressViolationError(
                f"{self.operator.name}: time {time!r} precedes the current epoch {self._epoch!r}"
            )

    def send(self, update: UpdateLike) -> None:
        update = Update(*update)
        self._check_time(update.time)
        with self._lock:
            self._buffer.append(update)

    def insert(self, key: Any, val: Any = (), diff: int = 1, time: Optional[Time] = None) -> None:
        self.send(Update(key, val, self._epoch if time is None else time, diff))

    def remove(self, key: Any, val: Any = (), time: Optional[Time] = None) -> None:
        self.insert(key, val, -1, time)

    def send_batch(self, updates: Iterable[UpdateLike]) -> None:
        for update in updates:
            self.send(update)

    def flush(self) -> None:
        with self._lock:
            if self._buffer:
                self.operator.staged.append(("send", self._buffer))
                self._buffer = []

    def advance_to(self, epoch: Time) -> None:
        if self._epoch is None:
            raise ProgressViolationError(f"{self.operator.name}: input is closed, cannot advance to {epoch!r}")
        if not less_equal(self._epoch, epoch):
            raise ProgressViolationError(
                f"{self.operator.name}: cannot advance from {self._epoch!r} back to {epoch!r}"
            )
        if epoch == self._epoch:
            return
        self.flush()
        self.operator.staged.append(("advance", epoch))
        self._epoch = epoch

    def close(self) -> None:
        if self._epoch is None:
            return
        self.flush()
        self.operator.staged.append(("close", None))
        self._epoch = None
        logger.debug(f"{self.operator!r}: input closed")


class Probe(Operator):
    """Reports the frontier of the stream it is attached to"""

    summary = None

    def __init__(self, scope, stream, name: str = "probe") -> None:
        super().__init__(scope, name, inputs=1, outputs=0)
        scope.connect(stream, self, 0)

    def schedule(self) -> None:
        self.inputs[0].pull()

    def frontier(self) -> Antichain:
        return self.inputs[0].frontier()

    def less_than(self, t: Time) -> bool:
        """True while times strictly before ``t`` may still appear"""
        return any(less_than(f, t) for f in self.frontier())

    def less_equal(self, t: Time) -> bool:
        """True while ``t`` itself may still appear"""
        return self.frontier().less_equal(t)

    def done(self) -> bool:
        return self.frontier().is_empty()


class Capture(Operator):
    """Records every update reaching it"""

    summary = None

    def __init__(self, scope, stream, name: str = "capture") -> None:
        super().__init__(scope, name, inputs=1, outputs=0)
        self.updates: list[Update] = []
        scope.connect(stream, self, 0)

    def schedule(self) -> None:
        for message in self.inputs[0].pull():
            if isinstance(message.data, list):
                self.updates.extend(message.data)
            else:
                self.updates.extend(message.data.updates())

    def frontier(self) -> Antichain:
        return self.inputs[0].frontier()

    def consolidated(self) -> list[Update]:
        return consolidate(self.updates, Antichain.empty())

    def accumulate(self, time: Time) -> dict[tuple[Any, Any], int]:
        return accumulate(self.updates, time)

    @staticmethod
    def gather(captures: Iterable["Capture"]) -> list[Update]:
        """The consolidated union of every worker's capture"""
        return consolidate((u for c in captures for u in c.updates), Antichain.empty())


def accumulate(updates: Iterable[Update], time: Time) -> dict[tuple[Any, Any], int]:
    """The collection at ``time``: diffs summed over updates at or before it"""
    totals: Counter = Counter()
    for u in updates:
        if less_equal(u.time, time):
            totals[(u.key, u.val)] += u.diff
    return {record: count for record, count in totals.items() if count != 0}
