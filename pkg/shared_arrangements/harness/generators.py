"""Seeded input streams

Every generator draws from its own ``numpy.random.Generator`` built from the
run seed and a stream name, so adding a stream never perturbs another.
"""

from collections import deque

import numpy as np

from shared_arrangements.trace.update import fnv1a

__all__ = ["ChurnStream", "GraphChurn", "QueryChurn", "random_edges", "rng"]


def rng(seed: int, stream: str) -> np.random.Generator:
    return np.random.default_rng([seed, fnv1a(stream.encode())])


class ChurnStream:
    """Insertions of random keys, each retracting the oldest live key once more than ``live`` are present"""

    def __init__(self, seed: int, keys: int, live: int, stream: str = "keys") -> None:
        self.keys = keys
        self.live = live
        self._rng = rng(seed, stream)
        self._present: deque[int] = deque()

    def take(self, n: int) -> list[tuple[int, int]]:
        """The changes of the next ``n`` arrivals as (key, diff) pairs"""
        changes: list[tuple[int, int]] = []
        for key in self._rng.integers(0, self.keys, size=n, dtype=np.int64).tolist():
            changes.append((key, 1))
            self._present.append(key)
            if len(self._present) > self.live:
                changes.append((self._present.popleft(), -1))
        return changes


def random_edges(seed: int, nodes: int, edges: int) -> list[tuple[int, int]]:
    """Uniform random directed edges"""
    draw = rng(seed, "graph").integers(0, nodes, size=(edges, 2), dtype=np.int64)
    return [(int(s), int(d)) for s, d in draw.tolist()]


class GraphChurn:
    """Each arrival adds a random edge and removes the oldest, keeping the edge count fixed"""

    def __init__(self, seed: int, nodes: int, initial: list[tuple[int, int]]) -> None:
        self.nodes = nodes
        self.size = len(initial)
        self._rng = rng(seed, "graph-churn")
        self._edges: deque[tuple[int, int]] = deque(initial)

    def take(self, n: int) -> list[tuple[tuple[int, int], int]]:
        changes: list[tuple[tuple[int, int], int]] = []
        for s, d in self._rng.integers(0, self.nodes, size=(n, 2), dtype=np.int64).tolist():
            edge = (int(s), int(d))
            changes.append((edge, 1))
            self._edges.append(edge)
            if len(self._edges) > self.size:
                changes.append((self._edges.popleft(), -1))
        return changes


class QueryChurn:
    """Adds uniformly random query arguments, retiring the oldest once ``concurrent`` are live"""

    def __init__(self, seed: int, query_class: str, nodes: int, concurrent: int, pairs: bool = False) -> None:
        self.nodes = nodes
        self.concurrent = concurrent
        self.pairs = pairs
        self._rng = rng(seed, f"queries.{query_class}")
        self._live: deque = deque()

    def _argument(self) -> object:
        if self.pairs:
            a, b = self._rng.integers(0, self.nodes, size=2, dtype=np.int64).tolist()
            return (int(a), int(b))
        return int(self._rng.integers(0, self.nodes))

    def take(self, n: int) -> list[tuple[object, int]]:
        changes: list[tuple[object, int]] = []
        for _ in range(n):
            if len(self._live) >= self.concurrent:
                changes.append((self._live.popleft(), -1))
            else:
                argument = self._argument()
                self._live.append(argument)
                changes.append((argument, 1))
        return changes

    def live(self) -> list[object]:
        return list(self._live)
