"""Brute-force reference answers over plain dictionaries

A collection is a ``dict[(key, val)] -> count`` with zero counts omitted.
"""

from collections import Counter, defaultdict, deque
from typing import Any, Iterable, Optional

from shared_arrangements.lattice.time import Time, less_equal

__all__ = [
    "collection_at",
    "counts",
    "distinct",
    "four_path",
    "join",
    "min_values",
    "reachable",
    "transitive_sizes",
    "two_hop",
]

Records = dict[tuple[Any, Any], int]


def collection_at(updates: Iterable[tuple[Any, Any, Time, int]], t: Time) -> Records:
    totals: Counter = Counter()
    for key, val, time, diff in updates:
        if less_equal(time, t):
            totals[(key, val)] += diff
    return {record: c for record, c in totals.items() if c != 0}


def counts(records: Records) -> Records:
    totals: Counter = Counter()
    for (key, _), c in records.items():
        totals[key] += c
    return {(key, total): 1 for key, total in totals.items() if total != 0}


def distinct(records: Records) -> Records:
    return {record: 1 for record, c in records.items() if c > 0}


def join(left: Records, right: Records) -> Records:
    by_key: dict[Any, list[tuple[Any, int]]] = defaultdict(list)
    for (key, val), c in right.items():
        by_key[key].append((val, c))
    result: Counter = Counter()
    for (key, a), ca in left.items():
        for b, cb in by_key.get(key, ()):
            result[(key, (a, b))] += ca * cb
    return {record: c for record, c in result.items() if c != 0}


def min_values(records: Records) -> Records:
    least: dict[Any, Any] = {}
    for (key, val), c in records.items():
        if c > 0 and (key not in least or val < least[key]):
            least[key] = val
    return {(key, val): 1 for key, val in least.items()}


def _adjacency(edges: Iterable[tuple[int, int]]) -> dict[int, set[int]]:
    adjacency: dict[int, set[int]] = defaultdict(set)
    for src, dst in edges:
        adjacency[src].add(dst)
    return adjacency


def reachable(edges: Iterable[tuple[int, int]], roots: Iterable[int]) -> set[int]:
    """Roots and every node reachable from them"""
    adjacency = _adjacency(edges)
    seen = set(roots)
    queue = deque(seen)
    while queue:
        for dst in adjacency.get(queue.popleft(), ()):
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return seen


def transitive_sizes(edges: Iterable[tuple[int, int]], sources: Iterable[int]) -> dict[int, int]:
    """Nodes at the end of a path of one or more edges, per source"""
    edges = list(edges)
    adjacency = _adjacency(edges)
    return {source: len(reachable(edges, adjacency.get(source, ()))) for source in sources}


def two_hop(edges: Iterable[tuple[int, int]], node: int) -> set[int]:
    adjacency = _adjacency(edges)
    return {dst for mid in adjacency.get(node, ()) for dst in adjacency.get(mid, ())}


def four_path(edges: Iterable[tuple[int, int]], source: int, target: int) -> Optional[int]:
    """Length of the shortest path of at most four edges, None without one"""
    adjacency = _adjacency(edges)
    frontier, seen = {source}, {source}
    for hops in range(5):
        if target in frontier:
            return hops
        frontier = {dst for node in frontier for dst in adjacency.get(node, ())} - seen
        seen |= frontier
    return None
