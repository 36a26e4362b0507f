"""Bilinear join of two arrangements

Each batch arriving on one input is joined against the other input's trace,
read exactly through the batches this operator has already acknowledged on
that side, so every pair of batches meets once. The matching work for a batch
is packaged as a resumable future and run a bounded number of outputs at a
time.
"""

from collections import deque
from typing import TYPE_CHECKING, Any, Callable, Iterator, Optional, cast

from loguru import logger

from shared_arrangements.dataflow.operator import Operator
from shared_arrangements.errors import WorkerMismatchError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import lub
from shared_arrangements.trace.batch import Batch
from shared_arrangements.trace.cursor import WorkCounters
from shared_arrangements.trace.update import Update, checked_mul

if TYPE_CHECKING:
    from shared_arrangements.arrangement.arrange import Arranged
    from shared_arrangements.dataflow.scope import Scope
    from shared_arrangements.operators.collection import Collection

__all__ = ["Join", "join_arranged"]

JoinLogic = Callable[[Any, Any, Any], tuple[Any, Any]]

_UNSET: Any = object()


class _Future:
    """The outstanding output of one batch joined against a trace snapshot"""

    def __init__(self, side: int, batch_cursor: Any, trace_cursor: Any, stamp: Antichain, logic: JoinLogic) -> None:
        self.side = side
        self.stamp = stamp
        self._work = self._matches(batch_cursor, trace_cursor, logic)
        self._buffer: list[Update] = []
        self._exhausted = False

    @property
    def done(self) -> bool:
        return self._exhausted and not self._buffer

    def _matches(self, this: Any, that: Any, logic: JoinLogic) -> Iterator[list[Update]]:
        swap = self.side == 1
        while this.key_valid() and that.key_valid():
            this_key, that_key = this.key(), that.key()
            if this_key < that_key:
                this.seek_key(that_key)
                continue
            if that_key < this_key:
                that.seek_key(this_key)
                continue
            others = []
            while that.val_valid():
                others.append((that.val(), that.history()))
                that.step_val()
            while this.val_valid():
                val, history = this.val(), this.history()
                produced = []
                for other_val, other_history in others:
                    key, out = logic(this_key, other_val, val) if swap else logic(this_key, val, other_val)
                    for t1, d1 in history:
                        for t2, d2 in other_history:
                            produced.append(Update(key, out, lub(t1, t2), checked_mul(d1, d2)))
                if produced:
                    yield produced
                this.step_val()
            this.step_key()
            that.step_key()

    def step(self, fuel: Optional[int]) -> list[Update]:
        """Produces up to ``fuel`` outputs, fewer only once the future completes"""
        output, self._buffer = self._buffer, []
        while fuel is None or len(output) < fuel:
            chunk = next(self._work, None)
            if chunk is None:
                self._exhausted = True
                break
            output.extend(chunk)
        if fuel is not None and len(output) > fuel:
            output, self._buffer = output[:fuel], output[fuel:]
        return output


class Join(Operator):
    def __init__(
        self,
        scope: "Scope",
        left: "Arranged",
        right: "Arranged",
        logic: JoinLogic,
        name: str = "join",
        fuel: Optional[int] = _UNSET,
    ) -> None:
        super().__init__(scope, name, inputs=2, outputs=1)
        for side, arranged in enumerate((left, right)):
            scope.require(arranged.scope, f"{name} input {side}")
            if arranged.handle.worker_index != scope.worker_index:
                raise WorkerMismatchError(
                    f"{name}: input {side} is a shard of worker {arranged.handle.worker_index}, "
                    f"not worker {scope.worker_index}"
                )
        if left.handle.trace.sharding is not right.handle.trace.sharding:
            raise WorkerMismatchError(f"{name}: inputs are sharded by different keys")
        self.logic = logic
        self.fuel = scope.defaults.join_fuel if fuel is _UNSET else fuel
        minimum = Antichain.minimum(scope.shape)
        self.handles: list[Any] = [left.handle.clone(through=minimum), right.handle.clone(through=minimum)]
        self.acknowledged = [minimum, minimum]
        self.futures: deque[_Future] = deque()
        scope.connect(left.stream, self, 0)
        scope.connect(right.stream, self, 1)

    def has_work(self) -> bool:
        return bool(self.futures)

    def schedule(self) -> None:
        counters: WorkCounters = self.scope.counters
        output = self.outputs[0]
        for side in (0, 1):
            other = 1 - side
            for message in self.inputs[side].pull():
                batch = cast(Batch, message.data)
                if not batch.is_empty():
                    trace_cursor = self.handles[other].cursor_through(self.acknowledged[other], counters)
                    output.retain(message.stamp)
                    self.futures.append(
                        _Future(side, batch.cursor(counters), trace_cursor, message.stamp, self.logic)
                    )
                self.acknowledged[side] = batch.upper

        fuel = self.fuel
        while self.futures and (fuel is None or fuel > 0):
            future = self.futures[0]
            produced = future.step(fuel)
            if produced:
                counters.join_outputs += len(produced)
                output.send(future.stamp, produced)
            if fuel is not None:
                fuel -= len(produced)
            if future.done:
                self.futures.popleft()
                output.release(future.stamp)

        self._compact()

    def _compact(self) -> None:
        for side in (0, 1):
            handle = self.handles[side]
            if handle is None:
                continue
            other_frontier = self.inputs[1 - side].frontier()
            if other_frontier.is_empty():
                logger.debug(f"{self!r}: input {1 - side} closed, dropping handle on input {side}")
                handle.drop()
                self.handles[side] = None
                continue
            if other_frontier.dominates(handle.since) and other_frontier != handle.since:
                handle.set_since(other_frontier)
            handle.set_through(self.acknowledged[side])

    def shutdown(self) -> None:
        for handle in self.handles:
            if handle is not None:
                handle.drop()
        self.handles = [None, None]


def join_arranged(
    left: "Arranged",
    right: "Arranged",
    logic: JoinLogic,
    name: str = "join",
    fuel: Optional[int] = _UNSET,
) -> "Collection":
    """Joins two arrangements on their keys; ``logic(key, left_val, right_val)`` builds each output record"""
    from shared_arrangements.operators.collection import Collection

    op = Join(left.scope, left, right, logic, name, fuel)
    return Collection(left.scope, op.stream())
