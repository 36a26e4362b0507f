"""A single trace fed epoch by epoch, read at every time its reader may read"""

import math
from itertools import groupby
from operator import itemgetter
from typing import Any, Optional

import numpy as np

from shared_arrangements.arrangement.handle import TraceHandle
from shared_arrangements.harness.verify import oracle
from shared_arrangements.harness.verify.runner import Case, Counterexample, Suite
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.trace.batch import Batch, BatchBuilder
from shared_arrangements.trace.spine import Trace
from shared_arrangements.trace.update import Update

__all__ = ["TRACE", "check_consolidated"]

EFFORTS: list[Optional[int]] = [None, 1, 8]
WORK_SLACK = 64


def generate(generator: np.random.Generator) -> Case:
    epochs = int(generator.integers(2, 10))
    params = {
        "effort": EFFORTS[int(generator.integers(len(EFFORTS)))],
        "epochs": epochs,
        "lag": int(generator.integers(0, 4)),
    }
    items = [
        (
            int(generator.integers(0, 8)),
            int(generator.integers(0, 3)),
            int(generator.integers(0, epochs)),
            int(generator.choice([-1, 1])),
        )
        for _ in range(int(generator.integers(1, 80)))
    ]
    return params, items


def check_consolidated(batch: Batch) -> None:
    """Raises unless the batch holds each (key, val, time) once with a nonzero diff"""
    for (key, val), group in groupby(batch.updates(), key=itemgetter(0, 1)):
        previous = None
        for update in group:
            if update.diff == 0 or update.time == previous:
                raise Counterexample(
                    f"{batch} is not consolidated at ({key!r}, {val!r}, {update.time!r})", [key, update.time]
                )
            previous = update.time


def check(params: dict[str, Any], items: list) -> None:
    effort = params["effort"]
    trace = Trace(int, merge_effort=effort, name="verify")
    handle = TraceHandle(trace, 0)
    for epoch in range(params["epochs"]):
        updates = [Update(k, v, t, d) for k, v, t, d in items if t == epoch]
        batch = BatchBuilder(int).extend(updates).seal(Antichain([epoch]), Antichain([epoch + 1]))
        trace.insert(batch)

        if effort is not None and trace.last_insert_work > effort * len(batch) + WORK_SLACK:
            raise Counterexample(
                f"inserting {len(batch)} updates at {epoch} did {trace.last_insert_work} units of merge work",
                [epoch, trace.last_insert_work],
            )
        if effort is None or effort >= 8:
            bound = 2 * math.log2(trace.inserted_batches) + 8
            if trace.resident_batches() > bound:
                raise Counterexample(
                    f"{trace.resident_batches()} batches after {trace.inserted_batches} inserts", [epoch]
                )
        for resident in trace.batches():
            check_consolidated(resident)

        since = max(epoch - params["lag"], 0)
        handle.set_since(Antichain([since]))
        for t in range(since, epoch + 1):
            read = {(k, v): c for k, v, c in handle.read_collection(t)}
            expected = oracle.collection_at(items, t)
            if read != expected:
                raise Counterexample(f"reading at {t} after epoch {epoch} gave {read}, expected {expected}", [t])
    handle.drop()


TRACE = Suite("trace", generate, check)
