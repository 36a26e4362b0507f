"""The arrange operator: the single writer of a shared trace

Updates are exchanged by key, buffered, and sealed into a batch each time the
input frontier advances. The batch is inserted into the worker's trace shard
and emitted downstream, so readers of the stream and readers of the trace see
the same immutable batches.
"""

from typing import TYPE_CHECKING, Any, Callable, Optional

from shared_arrangements.arrangement.handle import TraceHandle, TraceReader
from shared_arrangements.arrangement.views import ENTER, BatchView, HandleView
from shared_arrangements.dataflow.channels import Exchange
from shared_arrangements.dataflow.operator import Operator, Stream
from shared_arrangements.errors import ProgressViolationError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import enter_time
from shared_arrangements.trace.batch import BatchBuilder
from shared_arrangements.trace.spine import MergeEffort, Trace
from shared_arrangements.trace.update import Update

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope
    from shared_arrangements.operators.collection import Collection

__all__ = ["Arrange", "Arranged", "arrange", "hold_capabilities"]

_UNSET: Any = object()


def hold_capabilities(output, wanted: Antichain) -> None:
    """Adjusts the capabilities held at ``output`` to exactly ``wanted``"""
    held = set(output.capabilities)
    target = set(wanted)
    output.retain(target - held)
    output.release(held - target)


class Arrange(Operator):
    def __init__(
        self,
        scope: "Scope",
        stream: Stream,
        name: str,
        merge_effort: MergeEffort = _UNSET,
        key: Optional[Callable[[Update], Any]] = None,
    ) -> None:
        super().__init__(scope, name, inputs=1, outputs=1)
        if merge_effort is _UNSET:
            merge_effort = scope.defaults.merge_effort
        self.trace = Trace(
            scope.shape,
            merge_effort=merge_effort,
            counters=scope.counters,
            name=f"{name}@{scope.worker_index}",
            sharding=key,
        )
        self.lower = Antichain.minimum(scope.shape)
        self.buffer: list[Update] = []
        scope.connect(stream, self, 0, Exchange(key))

    def schedule(self) -> None:
        lower = self.lower
        for message in self.inputs[0].pull():
            for u in message.data:
                if not lower.less_equal(u.time):
                    raise ProgressViolationError(
                        f"{self.name}: update {u} arrived after the frontier passed {lower}"
                    )
            self.buffer.extend(message.data)

        frontier = self.inputs[0].frontier()
        output = self.outputs[0]
        if frontier != lower:
            ready = [u for u in self.buffer if not frontier.less_equal(u.time)]
            if ready:
                self.buffer = [u for u in self.buffer if frontier.less_equal(u.time)]
            batch = BatchBuilder(self.scope.shape).extend(ready).seal(lower, frontier)
            self.trace.insert(batch, writer=self.index)
            output.send(batch.update_times(), batch)
            self.lower = frontier
        hold_capabilities(output, Antichain(u.time for u in self.buffer))


class Arranged:
    """A stream of shared batches together with a reader handle on their trace

    The handle returned by arrangement operators lives only as long as the
    dataflow is being built; clone it to keep reading the trace afterwards.
    """

    def __init__(self, scope: "Scope", stream: Stream, handle: TraceReader) -> None:
        self.scope = scope
        self.stream = stream
        self.handle = handle

    @property
    def trace(self) -> TraceReader:
        return self.handle

    def _adopt(self, handle: Any) -> Any:
        self.scope.dataflow.construction_handles.append(handle)
        return handle

    def filter(self, predicate: Callable[[Any, Any], bool], name: str = "filter") -> "Arranged":
        """Skips (key, val) pairs failing ``predicate`` while navigating, without new state"""
        from shared_arrangements.operators.stateless import MapBatches

        op = MapBatches(self.scope, self.stream, name, lambda b: BatchView(b, None, predicate))
        handle = self._adopt(HandleView(self.handle.clone(), None, predicate))
        return Arranged(self.scope, op.stream(), handle)

    def enter(self, child: "Scope", name: str = "enter") -> "Arranged":
        """Presents the arrangement inside an iteration scope at round zero"""
        from shared_arrangements.operators.stateless import MapBatches

        self.scope.require(child.parent, f"{name}: parent of {child.name!r}")
        op = MapBatches(child, self.stream, name, lambda b: BatchView(b, ENTER, None), enter_time)
        handle = self._adopt(HandleView(self.handle.clone(), ENTER, None))
        return Arranged(child, op.stream(), handle)

    def as_collection(
        self, logic: Optional[Callable[[Any, Any], tuple[Any, Any]]] = None, name: str = "as_collection"
    ) -> "Collection":
        """Flattens the batches back into a stream of updates"""
        from shared_arrangements.operators.collection import Collection
        from shared_arrangements.operators.stateless import FlattenBatches

        op = FlattenBatches(self.scope, self.stream, name, logic)
        return Collection(self.scope, op.stream())

    def join(self, other: "Arranged", logic: Callable[[Any, Any, Any], tuple[Any, Any]], **kwargs: Any) -> "Collection":
        from shared_arrangements.operators.join import join_arranged

        return join_arranged(self, other, logic, **kwargs)

    def reduce(self, logic: Callable[[Any, list], list], **kwargs: Any) -> "Arranged":
        from shared_arrangements.operators.reduce import reduce_arranged

        return reduce_arranged(self, logic, **kwargs)

    def count(self, name: str = "count") -> "Arranged":
        from shared_arrangements.operators.reduce import count

        return count(self, name=name)

    def distinct(self, name: str = "distinct") -> "Arranged":
        from shared_arrangements.operators.reduce import distinct

        return distinct(self, name=name)

    def __repr__(self) -> str:
        return f"Arranged({self.handle!r})"


def arrange(
    collection: "Collection",
    name: str = "arrange",
    merge_effort: MergeEffort = _UNSET,
    key: Optional[Callable[[Update], Any]] = None,
) -> Arranged:
    """Arranges a collection of (key, val) records by key"""
    scope = collection.scope
    op = Arrange(scope, collection.stream, name, merge_effort, key)
    handle = TraceHandle(op.trace, scope.worker_index)
    scope.dataflow.construction_handles.append(handle)
    return Arranged(scope, op.stream(), handle)
