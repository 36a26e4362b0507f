"""Workers and the cluster that drives them

Each worker owns one shard of every operator of every dataflow and schedules
them round-robin. A cluster runs its workers either interleaved on the calling
thread or concurrently, one thread per worker, in lock-step rounds.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import count
from typing import Any, Callable, Optional, TypeVar

from loguru import logger

from shared_arrangements.config import config
from shared_arrangements.dataflow.scope import Dataflow, Scope
from shared_arrangements.trace.cursor import WorkCounters
from shared_arrangements.trace.spine import MergeEffort

__all__ = ["Cluster", "OperatorDefaults", "Worker"]

T = TypeVar("T")


@dataclass
class OperatorDefaults:
    merge_effort: MergeEffort
    join_fuel: int
    iterate_max_rounds: int

    @classmethod
    def from_config(cls) -> "OperatorDefaults":
        return cls(
            merge_effort=config.trace.effort(),
            join_fuel=config.operators.join_fuel,
            iterate_max_rounds=config.operators.iterate_max_rounds,
        )


class Worker:
    def __init__(self, cluster: "Cluster", index: int) -> None:
        self.cluster = cluster
        self.index = index
        self.counters = WorkCounters()
        self.dataflows: list[Dataflow] = []
        self._rotation = 0

    def step(self) -> bool:
        """Activates every operator of every live dataflow once; True if any did work"""
        dataflows = self.dataflows
        if not dataflows:
            return False
        active = False
        start = self._rotation % len(dataflows)
        self._rotation += 1
        finished = []
        for dataflow in dataflows[start:] + dataflows[:start]:
            for operator in dataflow.operators[self.index]:
                if operator.run():
                    active = True
            if dataflow.is_idle_on(self.index):
                finished.append(dataflow)
        for dataflow in finished:
            self._retire(dataflow)
        return active

    def _retire(self, dataflow: Dataflow) -> None:
        for operator in dataflow.operators[self.index]:
            operator.shutdown()
            operator.flush()
        self.dataflows.remove(dataflow)
        dataflow.complete[self.index] = True
        logger.debug(f"worker {self.index}: dataflow {dataflow.name!r} complete")

    def __repr__(self) -> str:
        return f"Worker({self.index}, dataflows={len(self.dataflows)})"


class Cluster:
    """A set of workers sharing one process"""

    def __init__(
        self,
        workers: Optional[int] = None,
        channel_capacity: Optional[int] = None,
        threaded: Optional[bool] = None,
        defaults: Optional[OperatorDefaults] = None,
    ) -> None:
        self.worker_count = workers if workers is not None else config.runtime.workers
        if self.worker_count < 1:
            raise ValueError(f"a cluster needs at least one worker, got {self.worker_count}")
        self.channel_capacity = channel_capacity if channel_capacity is not None else config.runtime.channel_capacity
        self.threaded = threaded if threaded is not None else config.runtime.threaded
        self.defaults = defaults if defaults is not None else OperatorDefaults.from_config()
        self.workers = [Worker(self, i) for i in range(self.worker_count)]
        self._names = count()
        self._pool: Optional[ThreadPoolExecutor] = None

    def dataflow(self, build: Callable[[Scope], T], name: Optional[str] = None) -> list[T]:
        """Builds a dataflow on every worker and returns each worker's build result"""
        name = name or f"dataflow-{next(self._names)}"
        dataflow = Dataflow(name, self.worker_count, self.channel_capacity)
        results = [build(Scope(dataflow, worker)) for worker in self.workers]
        for handle in dataflow.construction_handles:
            handle.drop()
        dataflow.construction_handles.clear()
        for worker in self.workers:
            for operator in dataflow.operators[worker.index]:
                operator.flush()
            worker.dataflows.append(dataflow)
        logger.debug(
            f"{name}: built {len(dataflow.tracker.operators)} operators and "
            f"{len(dataflow.channels)} channels on {self.worker_count} workers"
        )
        return results

    def step(self) -> bool:
        """One activation round across all workers; True if any worker did work"""
        if self.threaded and self.worker_count > 1:
            if self._pool is None:
                self._pool = ThreadPoolExecutor(self.worker_count, thread_name_prefix="worker")
            futures = [self._pool.submit(worker.step) for worker in self.workers]
            return any([f.result() for f in futures])
        return any([worker.step() for worker in self.workers])

    def step_while(self, condition: Callable[[], bool]) -> None:
        while condition():
            if not self.step():
                return

    def run_until(self, condition: Callable[[], bool]) -> bool:
        """Steps until ``condition`` holds; False if the cluster went idle first"""
        while not condition():
            if not self.step():
                return condition()
        return True

    def quiesce(self) -> None:
        """Steps until no worker has work left"""
        while self.step():
            pass

    def counters(self) -> WorkCounters:
        total = WorkCounters()
        for worker in self.workers:
            total = total.merged(worker.counters)
        return total

    def reset_counters(self) -> None:
        for worker in self.workers:
            worker.counters.reset()

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self) -> "Cluster":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()

    def __repr__(self) -> str:
        return f"Cluster(workers={self.worker_count}, threaded={self.threaded})"
