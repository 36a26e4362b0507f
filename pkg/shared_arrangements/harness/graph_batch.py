"""Iterative graph computations over a static edge collection

- ``reach``: nodes reachable from a root, the root included
- ``sssp``: hop distance from a root to every reachable node
- ``wcc``: each node labelled with the least node of its undirected component
- ``transitive_reach``: (node, source) for nodes at the end of a path of one or more edges from a source
"""

import time
from dataclasses import dataclass
from typing import Any, Callable, Literal, Optional

from loguru import logger

from shared_arrangements.arrangement.arrange import Arranged
from shared_arrangements.dataflow.input import Capture, InputHandle, accumulate
from shared_arrangements.dataflow.scope import Scope
from shared_arrangements.dataflow.worker import Cluster
from shared_arrangements.harness.edges import source_node
from shared_arrangements.operators.collection import Collection, new_input

__all__ = ["BatchResult", "Task", "datalog_tc", "graph_batch", "reach", "sssp", "transitive_reach", "wcc"]

Task = Literal["reach", "sssp", "wcc"]


def _min_value(key: Any, values: list[tuple[Any, int]]) -> list[tuple[Any, int]]:
    return [(min(value for value, _ in values), 1)]


def reach(edges: Arranged, roots: Collection) -> Collection:
    def body(reached: Collection) -> Collection:
        inner = edges.enter(reached.scope)
        step = reached.join_arranged(inner, lambda node, _, dst: (dst, ()), name="reach.step")
        return step.concat(roots.enter(reached.scope)).distinct("reach.distinct")

    return roots.iterate(body, "reach")


def sssp(edges: Arranged, roots: Collection) -> Collection:
    def body(distances: Collection) -> Collection:
        inner = edges.enter(distances.scope)
        step = distances.join_arranged(inner, lambda node, hops, dst: (dst, hops + 1), name="sssp.step")
        return step.concat(roots.enter(distances.scope)).reduce(_min_value, "sssp.min").as_collection()

    return roots.iterate(body, "sssp")


def wcc(edges: Collection) -> Collection:
    undirected = edges.concat(edges.map(lambda src, dst: (dst, src), "wcc.reverse")).arrange_by_key("wcc.edges")
    labels = undirected.as_collection(lambda node, _: (node, node)).distinct("wcc.nodes")

    def body(current: Collection) -> Collection:
        inner = undirected.enter(current.scope)
        step = current.join_arranged(inner, lambda node, label, other: (other, label), name="wcc.step")
        return step.concat(labels.enter(current.scope)).reduce(_min_value, "wcc.min").as_collection()

    return labels.iterate(body, "wcc")


def transitive_reach(edges: Arranged, sources: Collection) -> Collection:
    seeds = sources.join_arranged(edges, lambda src, _, dst: (dst, src), name="tc.seed")

    def body(reached: Collection) -> Collection:
        inner = edges.enter(reached.scope)
        step = reached.join_arranged(inner, lambda node, src, dst: (dst, src), name="tc.step")
        return step.concat(seeds.enter(reached.scope)).distinct("tc.distinct")

    return seeds.iterate(body, "tc")


@dataclass
class BatchResult:
    task: str
    records: dict[tuple[Any, Any], int]
    elapsed_ns: int
    summary: dict[str, Any]


def _run(
    workers: int,
    edges: list[tuple[int, int]],
    roots: list[tuple[Any, Any]],
    logic: Callable[[Collection, Arranged, Collection], Collection],
    name: str,
) -> tuple[dict[tuple[Any, Any], int], int]:
    def build(scope: Scope) -> tuple[InputHandle, InputHandle, Capture]:
        edges_input, edge_collection = new_input(scope, "edges")
        roots_input, root_collection = new_input(scope, "roots")
        arranged = edge_collection.arrange_by_key("edges.by_source")
        return edges_input, roots_input, logic(edge_collection, arranged, root_collection).capture(name)

    with Cluster(workers) as cluster:
        started = time.perf_counter_ns()
        shards = cluster.dataflow(build, name)
        for i, (src, dst) in enumerate(edges):
            shards[i % workers][0].insert(src, dst)
        for i, (key, val) in enumerate(roots):
            shards[i % workers][1].insert(key, val)
        for edges_input, roots_input, _ in shards:
            edges_input.close()
            roots_input.close()
        cluster.quiesce()
        elapsed = time.perf_counter_ns() - started
        records = accumulate(Capture.gather(capture for _, _, capture in shards), 0)
    return records, elapsed


def graph_batch(task: Task, edges: list[tuple[int, int]], workers: int = 1, root: Optional[int] = None) -> BatchResult:
    if root is None:
        root = source_node(edges)
    summary: dict[str, Any] = {"edges": len(edges)}
    if task == "wcc":
        records, elapsed = _run(workers, edges, [], lambda e, _, __: wcc(e), "wcc")
        summary["components"] = len({label for (_, label) in records})
        summary["nodes"] = len(records)
    elif root is None:
        records, elapsed = {}, 0
        summary["reached"] = 0
    elif task == "reach":
        records, elapsed = _run(workers, edges, [(root, ())], lambda _, a, r: reach(a, r), "reach")
        summary["root"] = root
        summary["reached"] = len(records)
    else:
        records, elapsed = _run(workers, edges, [(root, 0)], lambda _, a, r: sssp(a, r), "sssp")
        summary["root"] = root
        summary["reached"] = len(records)
        summary["max_distance"] = max((d for (_, d) in records), default=0)
    logger.info(f"{task}: {summary} in {elapsed / 1e6:.1f}ms")
    return BatchResult(task, records, elapsed, summary)


def datalog_tc(edges: list[tuple[int, int]], sources: list[int], workers: int = 1) -> BatchResult:
    """Number of nodes reachable by one or more edges from each source"""
    records, elapsed = _run(
        workers, edges, [(s, ()) for s in sources], lambda _, a, r: transitive_reach(a, r), "datalog-tc"
    )
    sizes = {source: 0 for source in sources}
    for (_, source), count in records.items():
        if count > 0:
            sizes[source] += 1
    logger.info(f"datalog-tc: {sizes} in {elapsed / 1e6:.1f}ms")
    return BatchResult("datalog-tc", records, elapsed, {"reachable": sizes})
