"""Dataflow graph construction

A dataflow is built once per worker by the same user function. The worker
copies must have identical shape: the first worker to reach an operator or a
channel registers it with the shared progress tracker, later workers attach to
the same slot.
"""

from typing import TYPE_CHECKING, Any, Optional

from loguru import logger

from shared_arrangements.dataflow.channels import Channel, Pact, Pipeline
from shared_arrangements.dataflow.progress import OperatorInfo, ProgressTracker
from shared_arrangements.errors import ScopeError
from shared_arrangements.lattice.time import Product, TimeShape

if TYPE_CHECKING:
    from shared_arrangements.dataflow.operator import Operator, Stream
    from shared_arrangements.dataflow.worker import Worker

__all__ = ["Dataflow", "Scope"]


class Dataflow:
    """The structure shared by every worker's copy of one dataflow"""

    def __init__(self, name: str, workers: int, channel_capacity: int) -> None:
        self.name = name
        self.worker_count = workers
        self.channel_capacity = channel_capacity
        self.tracker = ProgressTracker(name)
        self.channels: list[Channel] = []
        self.operators: list[list["Operator"]] = [[] for _ in range(workers)]
        self.construction_handles: list[Any] = []
        self.complete = [False] * workers
        self._channel_cursor = [0] * workers

    def register(self, worker_index: int, operator: "Operator", info: OperatorInfo) -> int:
        local = self.operators[worker_index]
        index = len(local)
        if index == len(self.tracker.operators):
            self.tracker.add_operator(info)
        elif self.tracker.operators[index].name != info.name:
            raise ScopeError(
                f"{self.name}: worker {worker_index} built {info.name!r} where "
                f"{self.tracker.operators[index].name!r} was expected"
            )
        local.append(operator)
        return index

    def channel(self, worker_index: int, stream: "Stream", target: "Operator", port: int, pact: Pact) -> Channel:
        index = self._channel_cursor[worker_index]
        self._channel_cursor[worker_index] += 1
        if index == len(self.channels):
            channel = Channel(index, self.worker_count, pact)
            self.channels.append(channel)
            self.tracker.add_edge(stream.operator.outputs[stream.port].location, target.inputs[port].location)
        return self.channels[index]

    def is_idle_on(self, worker_index: int) -> bool:
        if any(channel.queues[worker_index] for channel in self.channels):
            return False
        return self.tracker.is_idle()


class Scope:
    """One worker's view of a dataflow, or of an iteration scope nested in it"""

    def __init__(
        self,
        dataflow: Dataflow,
        worker: "Worker",
        shape: TimeShape = int,
        parent: Optional["Scope"] = None,
        name: str = "root",
    ) -> None:
        self.dataflow = dataflow
        self.worker = worker
        self.shape = shape
        self.parent = parent
        self.name = name

    @property
    def worker_index(self) -> int:
        return self.worker.index

    @property
    def worker_count(self) -> int:
        return self.dataflow.worker_count

    @property
    def channel_capacity(self) -> int:
        return self.dataflow.channel_capacity

    @property
    def tracker(self) -> ProgressTracker:
        return self.dataflow.tracker

    @property
    def counters(self):
        return self.worker.counters

    @property
    def defaults(self):
        return self.worker.cluster.defaults

    def register(self, operator: "Operator", info: OperatorInfo) -> int:
        return self.dataflow.register(self.worker_index, operator, info)

    def connect(self, stream: "Stream", target: "Operator", port: int, pact: Optional[Pact] = None) -> Channel:
        if stream.scope.dataflow is not self.dataflow:
            raise ScopeError(f"{target.name}: input stream belongs to dataflow {stream.scope.dataflow.name!r}")
        channel = self.dataflow.channel(self.worker_index, stream, target, port, pact or Pipeline())
        stream.operator.outputs[stream.port].connect(channel, target.inputs[port].location)
        target.inputs[port].attach(channel)
        return channel

    def iterative(self, name: str = "iterate") -> "Scope":
        """A child scope whose times carry an iteration round"""
        if self.shape is Product:
            raise ScopeError(f"{self.name}: iteration scopes nest at most one level deep")
        logger.debug(f"{self.dataflow.name}: iteration scope {name!r} on worker {self.worker_index}")
        return Scope(self.dataflow, self.worker, Product, parent=self, name=name)

    def require(self, other: Optional["Scope"], what: str) -> None:
        if other is not self:
            found = other.name if other is not None else None
            raise ScopeError(f"{what} lives in scope {found!r}, expected {self.name!r}")

    def __repr__(self) -> str:
        return f"Scope({self.dataflow.name}/{self.name}@{self.worker_index})"
