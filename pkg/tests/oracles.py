"""Brute-force answers and small dataflow drivers shared by the tests"""

from typing import Any, Callable

from shared_arrangements.dataflow import Capture, Cluster, InputHandle, Scope, accumulate
from shared_arrangements.harness.verify.oracle import (
    collection_at,
    counts,
    distinct,
    four_path,
    join,
    min_values,
    reachable,
    transitive_sizes,
    two_hop,
)
from shared_arrangements.operators import Collection, new_input

__all__ = [
    "collection_at",
    "counts",
    "distinct",
    "four_path",
    "join",
    "min_values",
    "reachable",
    "run_static",
    "transitive_sizes",
    "two_hop",
]


def run_static(
    logic: Callable[..., Collection],
    inputs: dict[str, list[tuple[Any, Any]]],
    workers: int = 1,
) -> dict[tuple[Any, Any], int]:
    """Loads each named input at time 0, runs ``logic`` over the collections and accumulates its output"""

    def build(scope: Scope) -> tuple[list[InputHandle], Capture]:
        handles, collections = [], []
        for name in inputs:
            handle, collection = new_input(scope, name)
            handles.append(handle)
            collections.append(collection)
        return handles, logic(*collections).capture("output")

    with Cluster(workers) as cluster:
        shards = cluster.dataflow(build, "static")
        for position, records in enumerate(inputs.values()):
            for i, (key, val) in enumerate(records):
                shards[i % workers][0][position].insert(key, val)
        for handles, _ in shards:
            for handle in handles:
                handle.close()
        cluster.quiesce()
        return accumulate(Capture.gather(capture for _, capture in shards), 0)
