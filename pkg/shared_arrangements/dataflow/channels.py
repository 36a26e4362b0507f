from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Optional, Union

from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.trace.batch import Batch
from shared_arrangements.trace.update import Update, route

__all__ = ["Channel", "Exchange", "Message", "Pact", "Pipeline", "stamp_of"]


@dataclass(slots=True)
class Message:
    """Data in flight; every time in ``data`` is beyond ``stamp``

    An empty stamp marks a message that carries no updates (an empty batch),
    which needs no progress accounting.
    """

    stamp: Antichain
    data: Union[list[Update], Batch]


def stamp_of(updates: list[Update]) -> Antichain:
    return Antichain({u.time for u in updates})


class Pipeline:
    """Messages stay on the sending worker"""

    def partition(self, data: list[Update], workers: int, sender: int) -> list[tuple[int, list[Update]]]:
        return [(sender, data)]


class Exchange:
    """Records move to the worker owning their key's hash"""

    def __init__(self, key: Optional[Callable[[Update], Any]] = None) -> None:
        self.key = key

    def partition(self, data: list[Update], workers: int, sender: int) -> list[tuple[int, list[Update]]]:
        if workers == 1:
            return [(0, data)]
        parts: dict[int, list[Update]] = {}
        key = self.key
        for u in data:
            target = route(u.key if key is None else key(u), workers)
            parts.setdefault(target, []).append(u)
        return sorted(parts.items())


Pact = Union[Pipeline, Exchange]


class Channel:
    """One edge of the dataflow graph with a FIFO queue per receiving worker"""

    def __init__(self, index: int, workers: int, pact: Pact) -> None:
        self.index = index
        self.pact = pact
        self.queues: list[deque[Message]] = [deque() for _ in range(workers)]

    def pending(self, worker: int) -> int:
        return len(self.queues[worker])
