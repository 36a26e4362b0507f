"""Open-loop drivers

Arrivals are scheduled at fixed intervals from the offered rate, independent
of how quickly the dataflows respond. Each epoch lasts at least one tick of
the harness floor; at its start every arrival already due is introduced, the
inputs advance, and the workers run until each class's probes pass the epoch.
Each worker records when its own probes of a class pass the epoch, measured
from the class's earliest introduced arrival or from the epoch start when it
had none. The per-worker recorders are merged when the loop ends.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional, TypeVar

from loguru import logger

from shared_arrangements.dataflow.input import InputHandle, Probe
from shared_arrangements.dataflow.worker import Cluster
from shared_arrangements.errors import DataflowError
from shared_arrangements.harness.latency import FLOOR_NS, LatencyRecorder

__all__ = ["Arrivals", "LoopStats", "advance_all", "on_worker", "open_loop", "probes_passed", "wait_for"]

K = TypeVar("K", bound=Hashable)


@dataclass
class Arrivals:
    """A class of arrivals offered at ``rate`` per second; ``emit(n)`` introduces the next ``n``"""

    name: str
    rate: float
    total: int
    emit: Callable[[int], None]
    probes: list[Probe]
    sent: int = 0

    @classmethod
    def for_duration(
        cls, name: str, rate: float, duration: float, emit: Callable[[int], None], probes: list[Probe]
    ) -> "Arrivals":
        return cls(name, rate, int(rate * duration), emit, probes)

    def arrival_ns(self, index: int) -> int:
        return int(index * 1e9 / self.rate)

    def due(self, elapsed_ns: int) -> int:
        """Arrivals scheduled at or before ``elapsed_ns`` not yet sent"""
        if self.rate <= 0 or self.sent >= self.total:
            return 0
        scheduled = min(int(elapsed_ns * self.rate / 1e9) + 1, self.total)
        return max(scheduled - self.sent, 0)

    @property
    def exhausted(self) -> bool:
        return self.sent >= self.total


@dataclass
class LoopStats:
    epochs: int = 0
    sent: dict[str, int] = field(default_factory=dict)
    elapsed_ns: int = 0
    duration_ns: int = 0
    saturated: bool = False

    def achieved_rate(self, name: str) -> float:
        if self.elapsed_ns == 0:
            return 0.0
        return self.sent.get(name, 0) * 1e9 / self.elapsed_ns


def advance_all(handles: Iterable[InputHandle], epoch: int) -> None:
    for handle in handles:
        handle.advance_to(epoch)


def probes_passed(probes: Iterable[Probe], epoch: int) -> bool:
    return not any(p.less_than(epoch) for p in probes)


def on_worker(probes: Iterable[Probe], worker: int) -> list[Probe]:
    return [p for p in probes if p.worker_index == worker]


def wait_for(cluster: Cluster, conditions: dict[K, Callable[[], bool]]) -> dict[K, int]:
    """Steps the cluster until every condition holds; the clock reading at which each first did"""
    completed: dict[K, int] = {}
    while True:
        now = time.perf_counter_ns()
        for name, condition in conditions.items():
            if name not in completed and condition():
                completed[name] = now
        if len(completed) == len(conditions):
            return completed
        if not cluster.step():
            stuck = [name for name in conditions if name not in completed]
            if all(conditions[name]() for name in stuck):
                continue
            raise DataflowError(f"workers went idle before {stuck} completed")


def open_loop(
    cluster: Cluster,
    arrivals: list[Arrivals],
    inputs: list[InputHandle],
    duration: float,
    recorder: LatencyRecorder,
    first_epoch: int = 1,
    tick_ns: int = FLOOR_NS,
    on_epoch: Optional[Callable[[int], None]] = None,
) -> LoopStats:
    """Runs until ``duration`` has elapsed and every arrival has been introduced and completed"""
    stats = LoopStats(duration_ns=int(duration * 1e9))
    workers = range(cluster.worker_count)
    recorders = [LatencyRecorder(recorder.floor_ns) for _ in workers]
    start = time.perf_counter_ns()
    epoch = first_epoch
    while True:
        elapsed = time.perf_counter_ns() - start
        if elapsed >= stats.duration_ns and all(a.exhausted for a in arrivals):
            break
        earliest: dict[str, int] = {}
        for source in arrivals:
            n = source.due(elapsed)
            if n:
                earliest[source.name] = start + source.arrival_ns(source.sent)
                source.emit(n)
                source.sent += n
        epoch_start = time.perf_counter_ns()
        advance_all(inputs, epoch)
        conditions = {
            (source.name, worker): (lambda probes=on_worker(source.probes, worker), e=epoch: probes_passed(probes, e))
            for source in arrivals
            for worker in workers
        }
        for (name, worker), finished in wait_for(cluster, conditions).items():
            recorders[worker].record(name, finished - earliest.get(name, epoch_start))
        if on_epoch is not None:
            on_epoch(epoch)
        stats.epochs += 1
        epoch += 1

        next_tick = start + (stats.epochs * tick_ns)
        pause = next_tick - time.perf_counter_ns()
        if pause > 0:
            time.sleep(pause / 1e9)

    for worker_recorder in recorders:
        recorder.merge(worker_recorder)
    stats.elapsed_ns = time.perf_counter_ns() - start
    stats.sent = {source.name: source.sent for source in arrivals}
    stats.saturated = stats.elapsed_ns > stats.duration_ns * 1.1 + 10 * tick_ns
    if stats.saturated:
        for source in arrivals:
            logger.warning(
                f"{source.name}: offered {source.rate:.0f}/s but achieved {stats.achieved_rate(source.name):.0f}/s; "
                "the workers are saturated"
            )
    logger.info(f"Open loop finished after {stats.epochs} epochs in {stats.elapsed_ns / 1e9:.3f}s")
    return stats
