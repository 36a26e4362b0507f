"""Interactive graph queries over edges arranged by source and by target

Each query reads a collection of arguments, so installing, retiring or
changing a query is an update to that collection.

- ``lookup``: (node, out-degree)
- ``one-hop``: (node, out-neighbor)
- ``two-hop``: (node, node two edges away), without repeats
- ``four-path``: ((source, target), length of the shortest path of at most four edges)
"""

from typing import Any, Callable, Optional

from shared_arrangements.arrangement.arrange import Arranged
from shared_arrangements.errors import ScopeError
from shared_arrangements.models import QueryClass
from shared_arrangements.operators.collection import Collection

__all__ = ["QUERIES", "USES", "four_path", "lookup", "one_hop", "two_hop"]


def _require(arranged: Optional[Arranged], query: str, order: str) -> Arranged:
    if arranged is None:
        raise ScopeError(f"{query} reads the edges arranged by {order}")
    return arranged


def lookup(args: Collection, by_source: Optional[Arranged], by_target: Optional[Arranged]) -> Collection:
    edges = _require(by_source, "lookup", "source")
    return args.join_arranged(edges, lambda node, _, dst: (node, dst), name="lookup").count("lookup.degree")


def one_hop(args: Collection, by_source: Optional[Arranged], by_target: Optional[Arranged]) -> Collection:
    edges = _require(by_source, "one-hop", "source")
    return args.join_arranged(edges, lambda node, _, dst: (node, dst), name="one-hop")


def two_hop(args: Collection, by_source: Optional[Arranged], by_target: Optional[Arranged]) -> Collection:
    edges = _require(by_source, "two-hop", "source")
    first = args.join_arranged(edges, lambda node, _, mid: (mid, node), name="two-hop.first")
    second = first.join_arranged(edges, lambda mid, node, dst: (node, dst), name="two-hop.second")
    return second.distinct("two-hop.distinct")


def _step(node: Any, tag: tuple[Any, int], other: Any) -> tuple[Any, tuple[Any, int]]:
    query, hops = tag
    return other, (query, hops + 1)


def _frontiers(start: Collection, edges: Arranged, name: str) -> Collection:
    """((node, query), hops) for nodes within two hops of the start"""
    one = start.join_arranged(edges, _step, name=f"{name}.1")
    two = one.join_arranged(edges, _step, name=f"{name}.2")
    return start.concat(one, two, name=f"{name}.all").map(lambda node, tag: ((node, tag[0]), tag[1]), f"{name}.key")


def four_path(args: Collection, by_source: Optional[Arranged], by_target: Optional[Arranged]) -> Collection:
    sources = args.map(lambda query, _: (query[0], (query, 0)), "four-path.from")
    targets = args.map(lambda query, _: (query[1], (query, 0)), "four-path.to")
    forward = _frontiers(sources, _require(by_source, "four-path", "source"), "four-path.fwd")
    backward = _frontiers(targets, _require(by_target, "four-path", "target"), "four-path.bwd")
    met = forward.join(backward, lambda key, out, back: (key[1], out + back), name="four-path.meet")
    shortest = met.reduce(lambda query, lengths: [(min(length for length, _ in lengths), 1)], name="four-path.min")
    return shortest.as_collection(name="four-path.result")


QueryBuilder = Callable[[Collection, Optional[Arranged], Optional[Arranged]], Collection]

QUERIES: dict[QueryClass, QueryBuilder] = {
    "lookup": lookup,
    "one-hop": one_hop,
    "two-hop": two_hop,
    "four-path": four_path,
}

# edge arrangements each query reads: (by source, by target)
USES: dict[QueryClass, tuple[bool, bool]] = {
    "lookup": (True, False),
    "one-hop": (True, False),
    "two-hop": (True, False),
    "four-path": (True, True),
}
