"""Arrangement microbenchmark

A changing collection of random keys is exchanged by key, arranged, and read
by a maintained count per key. Open-loop mode offers a fixed rate and reports
per-epoch latency; throughput mode pushes fixed-size batches as fast as the
workers absorb them.
"""

import time
from dataclasses import dataclass, field
from typing import Literal, Optional

from loguru import logger

from shared_arrangements.dataflow.input import Capture, InputHandle, Probe
from shared_arrangements.dataflow.scope import Scope
from shared_arrangements.dataflow.worker import Cluster
from shared_arrangements.harness.driver import Arrivals, advance_all, open_loop, probes_passed, wait_for
from shared_arrangements.harness.generators import ChurnStream
from shared_arrangements.harness.latency import LatencyRecorder
from shared_arrangements.harness.results import ResultLog
from shared_arrangements.models import WorkloadConfig
from shared_arrangements.operators.collection import new_input
from shared_arrangements.trace.cursor import WorkCounters
from shared_arrangements.trace.spine import Trace
from shared_arrangements.trace.update import Update

__all__ = ["ArrangeRun", "bench_arrange", "build_count"]

LATENCY_CLASS = "arrange"


@dataclass
class _Shard:
    handle: InputHandle
    probe: Probe
    traces: list[Trace]
    capture: Optional[Capture]


@dataclass
class ArrangeRun:
    recorder: LatencyRecorder
    traces: list[Trace]
    updates_sent: int = 0
    saturated: bool = False
    peak_throughput: float = 0.0
    mean_throughput: float = 0.0
    output: list[Update] = field(default_factory=list)
    memory: list[tuple[str, int, int]] = field(default_factory=list)

    def snapshot_memory(self) -> None:
        self.memory = [(t.name, t.resident_updates(), t.resident_batches()) for t in self.traces]


def build_count(scope: Scope, config: WorkloadConfig, capture: bool = False) -> _Shard:
    handle, keys = new_input(scope, "keys")
    arranged = keys.arrange_by_key("keys.arranged", config.effort())
    counts = arranged.count("keys.count")
    output = counts.as_collection()
    return _Shard(
        handle=handle,
        probe=output.probe(),
        traces=[arranged.handle.trace, counts.handle.trace],  # type: ignore[attr-defined]
        capture=output.capture() if capture else None,
    )


def _send(shards: list[_Shard], changes: list[tuple[int, int]], offset: int) -> None:
    workers = len(shards)
    for i, (key, diff) in enumerate(changes):
        shards[(offset + i) % workers].handle.insert(key, (), diff)


def bench_arrange(
    config: WorkloadConfig,
    mode: Literal["latency", "throughput"] = "latency",
    results: Optional[ResultLog] = None,
    capture: bool = False,
) -> ArrangeRun:
    cluster = Cluster(config.workers)
    with cluster:
        shards = cluster.dataflow(lambda scope: build_count(scope, config, capture), "bench-arrange")
        handles = [s.handle for s in shards]
        probes = [s.probe for s in shards]
        stream = ChurnStream(config.seed, config.keys, live=config.keys)
        run = ArrangeRun(recorder=LatencyRecorder(), traces=[t for s in shards for t in s.traces])

        if mode == "latency":
            offset = 0

            def emit(n: int) -> None:
                nonlocal offset
                changes = stream.take(n)
                _send(shards, changes, offset)
                offset += len(changes)

            arrivals = Arrivals.for_duration(LATENCY_CLASS, config.rate, config.duration, emit, probes)
            stats = open_loop(cluster, [arrivals], handles, config.duration, run.recorder)
            run.updates_sent = offset
            run.saturated = stats.saturated
        else:
            _throughput(cluster, shards, stream, config, run)

        run.snapshot_memory()
        for handle in handles:
            handle.close()
        cluster.quiesce()
        if capture:
            run.output = Capture.gather(s.capture for s in shards if s.capture is not None)
        counters = cluster.counters()

    logger.info(
        f"bench-arrange: {run.updates_sent} updates on {config.workers} workers, "
        f"merge work {counters.merge_work}, max per insert {counters.max_insert_work}"
    )
    if results is not None:
        _write(results, run, counters, mode)
    return run


def _throughput(
    cluster: Cluster, shards: list[_Shard], stream: ChurnStream, config: WorkloadConfig, run: ArrangeRun
) -> None:
    handles = [s.handle for s in shards]
    probes = [s.probe for s in shards]
    per_epoch = config.batch_size * config.workers
    deadline = time.perf_counter_ns() + int(config.duration * 1e9)
    rates: list[float] = []
    epoch = 1
    while time.perf_counter_ns() < deadline:
        started = time.perf_counter_ns()
        changes = stream.take(per_epoch)
        _send(shards, changes, run.updates_sent)
        run.updates_sent += len(changes)
        advance_all(handles, epoch)
        finished = wait_for(cluster, {"throughput": lambda e=epoch: probes_passed(probes, e)})["throughput"]
        elapsed = max(finished - started, 1)
        run.recorder.record("throughput-epoch", elapsed)
        rates.append(len(changes) * 1e9 / elapsed)
        epoch += 1
    if rates:
        run.peak_throughput = max(rates)
        run.mean_throughput = sum(rates) / len(rates)
    logger.info(f"throughput: peak {run.peak_throughput:.0f} updates/s, mean {run.mean_throughput:.0f} updates/s")


def _write(results: ResultLog, run: ArrangeRun, counters: WorkCounters, mode: str) -> None:
    results.latencies(run.recorder)
    for name, updates, batches in run.memory:
        results.memory(name, updates, batches)
    results.counters(counters)
    results.work("updates_sent", run.updates_sent)
    results.work("saturated", int(run.saturated))
    if mode == "throughput":
        results.work("throughput_peak", run.peak_throughput)
        results.work("throughput_mean", run.mean_throughput)
