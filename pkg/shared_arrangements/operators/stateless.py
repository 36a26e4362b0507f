"""Record-at-a-time operators

None of these keep state between activations: each message is transformed
and forwarded at the stamp it arrived with, mapped through the operator's
summary when it crosses into or out of an iteration scope.
"""

from typing import TYPE_CHECKING, Any, Callable, Iterable, Optional, cast

from shared_arrangements.dataflow.channels import Pact
from shared_arrangements.dataflow.operator import Operator, Stream
from shared_arrangements.dataflow.progress import Summary, identity
from shared_arrangements.lattice.time import enter_time, leave_time
from shared_arrangements.trace.batch import Batch
from shared_arrangements.trace.update import Update

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope

__all__ = [
    "Concat",
    "FlattenBatches",
    "MapBatches",
    "Unary",
    "enter_updates",
    "filter_updates",
    "flat_map_updates",
    "inspect_updates",
    "leave_updates",
    "map_updates",
    "negate_updates",
]

Transform = Callable[[list[Update]], list[Update]]


class Unary(Operator):
    """Applies ``transform`` to the updates of every message"""

    def __init__(
        self,
        scope: "Scope",
        stream: Stream,
        name: str,
        transform: Transform,
        summary: Optional[Summary] = None,
        pact: Optional[Pact] = None,
    ) -> None:
        if summary is not None:
            self.summary = summary
        super().__init__(scope, name, inputs=1, outputs=1)
        self.transform = transform
        scope.connect(stream, self, 0, pact)

    def schedule(self) -> None:
        output = self.outputs[0]
        summary = self.summary
        for message in self.inputs[0].pull():
            updates = self.transform(message.data)  # type: ignore[arg-type]
            if updates:
                stamp = message.stamp if summary is identity else message.stamp.map(summary)
                output.send(stamp, updates)


class Concat(Operator):
    """Merges several streams of the same scope"""

    def __init__(self, scope: "Scope", streams: list[Stream], name: str = "concat") -> None:
        super().__init__(scope, name, inputs=len(streams), outputs=1)
        for port, stream in enumerate(streams):
            scope.require(stream.scope, f"{name} input {port}")
            scope.connect(stream, self, port)

    def schedule(self) -> None:
        output = self.outputs[0]
        for port in self.inputs:
            for message in port.pull():
                output.send(message.stamp, message.data)


class MapBatches(Operator):
    """Forwards each batch through ``logic``, typically wrapping it in a view"""

    def __init__(
        self,
        scope: "Scope",
        stream: Stream,
        name: str,
        logic: Callable[[Any], Any],
        summary: Optional[Summary] = None,
    ) -> None:
        if summary is not None:
            self.summary = summary
        super().__init__(scope, name, inputs=1, outputs=1)
        self.logic = logic
        scope.connect(stream, self, 0)

    def schedule(self) -> None:
        output = self.outputs[0]
        summary = self.summary
        for message in self.inputs[0].pull():
            stamp = message.stamp if summary is identity else message.stamp.map(summary)
            output.send(stamp, self.logic(message.data))


class FlattenBatches(Operator):
    """Turns a stream of batches back into a stream of updates"""

    def __init__(
        self,
        scope: "Scope",
        stream: Stream,
        name: str,
        logic: Optional[Callable[[Any, Any], tuple[Any, Any]]] = None,
    ) -> None:
        super().__init__(scope, name, inputs=1, outputs=1)
        self.logic = logic
        scope.connect(stream, self, 0)

    def schedule(self) -> None:
        output = self.outputs[0]
        logic = self.logic
        for message in self.inputs[0].pull():
            batch = cast(Batch, message.data)
            if logic is None:
                updates = list(batch.updates())
            else:
                updates = [Update(*logic(u.key, u.val), u.time, u.diff) for u in batch.updates()]
            output.send(message.stamp, updates)


def map_updates(logic: Callable[[Any, Any], tuple[Any, Any]]) -> Transform:
    return lambda updates: [Update(*logic(u.key, u.val), u.time, u.diff) for u in updates]


def flat_map_updates(logic: Callable[[Any, Any], Iterable[tuple[Any, Any]]]) -> Transform:
    return lambda updates: [Update(k, v, u.time, u.diff) for u in updates for k, v in logic(u.key, u.val)]


def filter_updates(predicate: Callable[[Any, Any], bool]) -> Transform:
    return lambda updates: [u for u in updates if predicate(u.key, u.val)]


def negate_updates(updates: list[Update]) -> list[Update]:
    return [Update(u.key, u.val, u.time, -u.diff) for u in updates]


def enter_updates(updates: list[Update]) -> list[Update]:
    return [Update(u.key, u.val, enter_time(u.time), u.diff) for u in updates]  # type: ignore[arg-type]


def leave_updates(updates: list[Update]) -> list[Update]:
    return [Update(u.key, u.val, leave_time(u.time), u.diff) for u in updates]  # type: ignore[arg-type]


def inspect_updates(logic: Callable[[Update], None]) -> Transform:
    def transform(updates: list[Update]) -> list[Update]:
        for u in updates:
            logic(u)
        return updates

    return transform
