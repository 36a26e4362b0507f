"""Progress tracking by pointstamp occurrence counting

A pointstamp is a (location, time) pair: a capability held at an operator
output, or a message in flight to an operator input. The frontier at an input
is the minimal antichain of every outstanding pointstamp's time, carried
along graph paths by the path summaries of the operators it crosses.
"""

import threading
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Time, less_equal

__all__ = ["Location", "OperatorInfo", "ProgressTracker", "Summary", "identity"]

Summary = Callable[[Time], Optional[Time]]


def identity(t: Time) -> Time:
    return t


@dataclass(frozen=True, slots=True)
class Location:
    operator: int
    port: int
    is_input: bool

    @classmethod
    def source(cls, operator: int, port: int) -> "Location":
        return cls(operator, port, False)

    @classmethod
    def target(cls, operator: int, port: int) -> "Location":
        return cls(operator, port, True)


@dataclass
class OperatorInfo:
    name: str
    inputs: int
    outputs: int
    summary: Optional[Summary]


class ProgressTracker:
    """Pointstamp counts for one dataflow, shared by every worker"""

    def __init__(self, name: str = "dataflow") -> None:
        self.name = name
        self.operators: list[OperatorInfo] = []
        self.edges: list[tuple[Location, Location]] = []
        self._counts: dict[Location, Counter] = {}
        self._lock = threading.Lock()
        self._version = 0
        self._cached_version = -1
        self._frontiers: dict[Location, Antichain] = {}
        self._successors: dict[Location, list[tuple[Location, Optional[Summary]]]] = {}

    def add_operator(self, info: OperatorInfo) -> int:
        self.operators.append(info)
        self._successors = {}
        self._version += 1
        return len(self.operators) - 1

    def add_edge(self, source: Location, target: Location) -> None:
        self.edges.append((source, target))
        self._successors = {}
        self._version += 1

    def _build_successors(self) -> None:
        successors: dict[Location, list[tuple[Location, Optional[Summary]]]] = {}
        for source, target in self.edges:
            successors.setdefault(source, []).append((target, None))
        for index, info in enumerate(self.operators):
            if info.summary is None:
                continue
            for i in range(info.inputs):
                successors[Location.target(index, i)] = [
                    (Location.source(index, o), info.summary) for o in range(info.outputs)
                ]
        self._successors = successors

    def apply(self, changes: Iterable[tuple[Location, Time, int]]) -> None:
        with self._lock:
            for location, time, delta in changes:
                counts = self._counts.get(location)
                if counts is None:
                    counts = self._counts[location] = Counter()
                total = counts[time] + delta
                if total == 0:
                    del counts[time]
                else:
                    counts[time] = total
            self._version += 1

    def frontier(self, location: Location) -> Antichain:
        with self._lock:
            if self._cached_version != self._version:
                self._recompute()
            return self._frontiers.get(location, _EMPTY)

    def version(self) -> int:
        return self._version

    def is_idle(self) -> bool:
        with self._lock:
            return not any(counts for counts in self._counts.values())

    def outstanding(self) -> dict[Location, dict[Time, int]]:
        with self._lock:
            return {loc: dict(c) for loc, c in self._counts.items() if c}

    def _recompute(self) -> None:
        if not self._successors and (self.edges or self.operators):
            self._build_successors()
        reached: dict[Location, list[Time]] = {}
        stack: list[tuple[Location, Time]] = [
            (loc, t) for loc, counts in self._counts.items() for t, c in counts.items() if c > 0
        ]
        successors = self._successors
        while stack:
            location, time = stack.pop()
            antichain = reached.setdefault(location, [])
            if any(less_equal(x, time) for x in antichain):
                continue
            antichain[:] = [x for x in antichain if not less_equal(time, x)]
            antichain.append(time)
            for target, summary in successors.get(location, ()):
                advanced = time if summary is None else summary(time)
                if advanced is not None:
                    stack.append((target, advanced))
        self._frontiers = {loc: Antichain(times) for loc, times in reached.items() if loc.is_input}
        self._cached_version = self._version


_EMPTY = Antichain.empty()
