"""Join against a pre-existing arrangement

``n`` records are arranged once. For each batch size ``m`` a new dataflow
imports that arrangement and joins ``m`` sampled keys against it; the work it
does should track ``m``, not ``n``.
"""

import time
from dataclasses import dataclass, field
from typing import Optional

from loguru import logger

from shared_arrangements.arrangement.handle import TraceHandle
from shared_arrangements.dataflow.input import Capture, InputHandle, Probe
from shared_arrangements.dataflow.scope import Scope
from shared_arrangements.dataflow.worker import Cluster
from shared_arrangements.harness.generators import rng
from shared_arrangements.harness.latency import FLOOR_NS
from shared_arrangements.harness.results import ResultLog
from shared_arrangements.operators.collection import new_input
from shared_arrangements.trace.update import Update

__all__ = ["JoinMeasurement", "bench_join", "record_value"]


def record_value(key: int) -> int:
    return key * 7 % 1_000_003


@dataclass
class JoinMeasurement:
    batch_size: int
    latency_ns: int
    cursor_steps: int
    join_outputs: int
    output: list[Update] = field(default_factory=list)


@dataclass
class _Query:
    handle: InputHandle
    probe: Probe
    capture: Optional[Capture]


def _load(cluster: Cluster, arranged: int) -> list[TraceHandle]:
    def build(scope: Scope) -> tuple[InputHandle, TraceHandle]:
        handle, records = new_input(scope, "records")
        return handle, records.arrange_by_key("records.arranged").handle.clone()  # type: ignore[attr-defined]

    built = cluster.dataflow(build, "bench-join.records")
    handles = [h for h, _ in built]
    workers = len(handles)
    for key in range(arranged):
        handles[key % workers].insert(key, record_value(key))
    for handle in handles:
        handle.close()
    cluster.quiesce()
    logger.info(f"Arranged {arranged} records on {workers} workers")
    return [trace for _, trace in built]


def _measure(cluster: Cluster, traces: list[TraceHandle], keys: list[int], capture: bool) -> JoinMeasurement:
    def build(scope: Scope) -> _Query:
        imported = traces[scope.worker_index].import_into(scope, "records.import")
        handle, queries = new_input(scope, "queries")
        joined = queries.join_arranged(imported, lambda key, _, val: (key, val), name="lookup")
        return _Query(handle, joined.probe(), joined.capture() if capture else None)

    cluster.reset_counters()
    started = time.perf_counter_ns()
    shards = cluster.dataflow(build, f"bench-join.{len(keys)}")
    for i, key in enumerate(keys):
        shards[i % len(shards)].handle.insert(key)
    for shard in shards:
        shard.handle.close()
    cluster.run_until(lambda: all(s.probe.done() for s in shards))
    latency = max(time.perf_counter_ns() - started, FLOOR_NS)
    counters = cluster.counters()
    output = Capture.gather(s.capture for s in shards if s.capture is not None) if capture else []
    return JoinMeasurement(len(keys), latency, counters.cursor_steps, counters.join_outputs, output)


def bench_join(
    arranged: int,
    batches: list[int],
    workers: int = 1,
    seed: int = 0,
    results: Optional[ResultLog] = None,
    capture: bool = False,
) -> list[JoinMeasurement]:
    if batches and max(batches) > arranged:
        raise ValueError(f"batch size {max(batches)} exceeds the {arranged} arranged records")
    measurements = []
    with Cluster(workers) as cluster:
        traces = _load(cluster, arranged)
        for m in batches:
            keys = sorted(rng(seed, f"join.{m}").choice(arranged, size=m, replace=False).tolist())
            measurement = _measure(cluster, traces, keys, capture)
            measurements.append(measurement)
            logger.info(
                f"m={m}: {measurement.latency_ns / 1e6:.2f}ms, {measurement.cursor_steps} cursor steps, "
                f"{measurement.join_outputs} outputs"
            )
            if measurement.join_outputs != m:
                logger.warning(f"m={m}: expected {m} join outputs, produced {measurement.join_outputs}")
        for trace in traces:
            trace.drop()

    if results is not None:
        for measurement in measurements:
            _write(results, measurement)
    return measurements


def _write(results: ResultLog, measurement: JoinMeasurement) -> None:
    suffix = f"[m={measurement.batch_size}]"
    results.latency(f"join-{measurement.batch_size}", measurement.latency_ns)
    results.work(f"cursor_steps{suffix}", measurement.cursor_steps)
    results.work(f"join_outputs{suffix}", measurement.join_outputs)

