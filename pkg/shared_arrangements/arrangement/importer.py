"""Import of an existing trace into another dataflow

The import replays the trace's current batches, merged as far as possible,
then forwards each batch the arrange operator mints afterwards. The replay is
taken and the subscription opened together, so the sequence is contiguous.
"""

from typing import TYPE_CHECKING

from loguru import logger

from shared_arrangements.arrangement.arrange import Arranged, hold_capabilities
from shared_arrangements.arrangement.handle import TraceHandle
from shared_arrangements.dataflow.operator import Operator
from shared_arrangements.errors import ScopeError, WorkerMismatchError
from shared_arrangements.lattice.antichain import Antichain

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope

__all__ = ["Import", "import_trace"]


class Import(Operator):
    def __init__(self, scope: "Scope", handle: TraceHandle, name: str) -> None:
        super().__init__(scope, name, inputs=0, outputs=1)
        self.trace = handle.trace
        self.replay = self.trace.merged_batches()
        self.live = self.trace.subscribe()
        self.upper = Antichain.minimum(scope.shape)
        self.outputs[0].retain(self.upper)
        logger.debug(f"{name}: replaying {len(self.replay)} batches of {self.trace.name} through {self.trace.upper}")

    def has_work(self) -> bool:
        return bool(self.replay) or bool(self.live)

    def schedule(self) -> None:
        output = self.outputs[0]
        batches, self.replay = self.replay, []
        while self.live:
            batches.append(self.live.popleft())
        for batch in batches:
            output.send(batch.update_times(), batch)
            self.upper = batch.upper
        if batches:
            hold_capabilities(output, self.upper)

    def shutdown(self) -> None:
        self.trace.unsubscribe(self.live)


def import_trace(handle: TraceHandle, scope: "Scope", name: str) -> Arranged:
    if handle.worker_index != scope.worker_index:
        raise WorkerMismatchError(
            f"{name}: trace shard of worker {handle.worker_index} cannot be imported on worker {scope.worker_index}"
        )
    if handle.shape is not scope.shape:
        raise ScopeError(f"{name}: trace times are {handle.shape.__name__}, scope times are {scope.shape.__name__}")
    op = Import(scope, handle, name)
    construction = handle.clone()
    scope.dataflow.construction_handles.append(construction)
    return Arranged(scope, op.stream(), construction)
