"""Operator shards and their ports

Every operator is instantiated once per worker. An activation pulls messages
from its inputs, emits messages and adjusts its capabilities; all progress
changes of an activation are applied to the tracker atomically, and only
afterwards are the emitted messages pushed to their channels.
"""

from abc import ABC, abstractmethod
from collections import Counter, deque
from typing import TYPE_CHECKING, Any, Iterable, Optional, Union

from shared_arrangements.dataflow.channels import Channel, Message
from shared_arrangements.dataflow.progress import Location, OperatorInfo, Summary, identity
from shared_arrangements.errors import CapabilityError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Time, TimeShape, less_equal
from shared_arrangements.trace.batch import Batch
from shared_arrangements.trace.update import Update

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope

__all__ = ["InputPort", "Operator", "OutputPort", "Stream"]


class Stream:
    """An operator output viewed as the source of a dataflow edge"""

    __slots__ = ("scope", "operator", "port")

    def __init__(self, scope: "Scope", operator: "Operator", port: int) -> None:
        self.scope = scope
        self.operator = operator
        self.port = port

    @property
    def shape(self) -> TimeShape:
        return self.scope.shape


class InputPort:
    def __init__(self, operator: "Operator", index: int) -> None:
        self.operator = operator
        self.index = index
        self.location = Location.target(operator.index, index)
        self.channel: Optional[Channel] = None
        self._queue: Optional[deque[Message]] = None

    def attach(self, channel: Channel) -> None:
        self.channel = channel
        self._queue = channel.queues[self.operator.worker_index]

    def frontier(self) -> Antichain:
        return self.operator.scope.tracker.frontier(self.location)

    def pending(self) -> bool:
        return bool(self._queue)

    def pull(self) -> list[Message]:
        """Drains delivered messages, consuming their pointstamps"""
        queue = self._queue
        if not queue:
            return []
        messages = []
        op = self.operator
        while queue:
            message = queue.popleft()
            for t in message.stamp:
                op._changes.append((self.location, t, -1))
                op._grant(t)
            messages.append(message)
        return messages


class OutputPort:
    def __init__(self, operator: "Operator", index: int) -> None:
        self.operator = operator
        self.index = index
        self.location = Location.source(operator.index, index)
        self.targets: list[tuple[Channel, Location]] = []
        self.capabilities: Counter = Counter()

    def connect(self, channel: Channel, target: Location) -> None:
        self.targets.append((channel, target))

    def retain(self, stamp: Iterable[Time]) -> None:
        op = self.operator
        for t in stamp:
            self.capabilities[t] += 1
            op._changes.append((self.location, t, 1))

    def release(self, stamp: Iterable[Time]) -> None:
        op = self.operator
        for t in stamp:
            held = self.capabilities[t]
            if held <= 0:
                raise CapabilityError(f"{op.name}: releasing unheld capability at {t!r}")
            if held == 1:
                del self.capabilities[t]
            else:
                self.capabilities[t] = held - 1
            op._changes.append((self.location, t, -1))

    def release_all(self) -> None:
        for t, held in list(self.capabilities.items()):
            self.release([t] * held)

    def held(self) -> Antichain:
        return Antichain(self.capabilities)

    def _check(self, stamp: Antichain) -> None:
        op = self.operator
        for t in stamp:
            if any(less_equal(c, t) for c in self.capabilities):
                continue
            if any(less_equal(g, t) for g in op._grants):
                continue
            raise CapabilityError(f"{op.name}: emitting at {t!r} without a capability")

    def send(self, stamp: Antichain, data: Union[list[Update], Batch, Any]) -> None:
        """Emits ``data`` at ``stamp``; batches stay on this worker, records follow each channel pact"""
        if isinstance(data, list) and not data:
            return
        self._check(stamp)
        op = self.operator
        workers = op.scope.worker_count
        capacity = op.scope.channel_capacity
        for channel, target in self.targets:
            if not isinstance(data, list):
                self._stage(channel.queues[op.worker_index], target, Message(stamp, data))
                continue
            for destination, part in channel.pact.partition(data, workers, op.worker_index):
                for start in range(0, len(part), capacity):
                    chunk = part[start : start + capacity]
                    chunk_stamp = stamp if len(chunk) == len(data) else Antichain({u.time for u in chunk})
                    self._stage(channel.queues[destination], target, Message(chunk_stamp, chunk))

    def _stage(self, queue: deque, target: Location, message: Message) -> None:
        op = self.operator
        for t in message.stamp:
            op._changes.append((target, t, 1))
        op._pushes.append((queue, message))


class Operator(ABC):
    """One worker's shard of a dataflow operator"""

    summary: Optional[Summary] = staticmethod(identity)  # type: ignore[assignment]

    def __init__(self, scope: "Scope", name: str, inputs: int = 0, outputs: int = 1) -> None:
        self.scope = scope
        self.name = name
        self.worker_index = scope.worker_index
        self._changes: list[tuple[Location, Time, int]] = []
        self._pushes: list[tuple[deque, Message]] = []
        self._grants: list[Time] = []
        self.index = scope.register(self, OperatorInfo(name, inputs, outputs, self.summary))
        self.inputs = [InputPort(self, i) for i in range(inputs)]
        self.outputs = [OutputPort(self, o) for o in range(outputs)]

    def stream(self, port: int = 0) -> Stream:
        return Stream(self.scope, self, port)

    def _grant(self, t: Time) -> None:
        summary = self.summary
        if summary is None:
            return
        advanced = summary(t)
        if advanced is not None:
            self._grants.append(advanced)

    @abstractmethod
    def schedule(self) -> None:
        """Performs one activation"""

    def has_work(self) -> bool:
        """True while the operator holds work it will do without further input"""
        return False

    def run(self) -> bool:
        """Activates the operator and publishes its effects; True if anything happened"""
        pending = any(port.pending() for port in self.inputs) or self.has_work()
        self.schedule()
        active = bool(self._changes or self._pushes)
        self.flush()
        return pending or active

    def shutdown(self) -> None:
        """Releases held resources once the dataflow has completed on this worker"""

    def flush(self) -> None:
        if self._changes:
            self.scope.tracker.apply(self._changes)
            self._changes = []
        if self._pushes:
            for queue, message in self._pushes:
                queue.append(message)
            self._pushes = []
        self._grants = []

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}@{self.worker_index})"
