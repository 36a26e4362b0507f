import math

import numpy as np
import pytest

from shared_arrangements.arrangement import TraceHandle
from shared_arrangements.errors import (
    BatchBoundsError,
    CompactionError,
    DiffOverflowError,
    DiscontiguousBatchError,
    HandleDroppedError,
    InvalidReadError,
)
from shared_arrangements.harness.verify import TRACE, run_suite
from shared_arrangements.lattice import Antichain
from shared_arrangements.trace import BatchBuilder, InProgressMerge, Trace, Update, WorkCounters, consolidate
from shared_arrangements.trace.update import I64_MAX, checked_add, fnv1a, route


def seal(updates, lower, upper):
    return BatchBuilder(int).extend(Update(*u) for u in updates).seal(Antichain([lower]), Antichain([upper]))


def test_seal_consolidates():
    batch = seal([("a", 1, 0, 1), ("a", 1, 0, -1), ("b", 2, 0, 1), ("b", 2, 0, 2)], 0, 1)
    assert list(batch.updates()) == [Update("b", 2, 0, 3)]


def test_seal_rejects_updates_outside_its_bounds():
    with pytest.raises(BatchBoundsError):
        seal([("a", 1, 3, 1)], 0, 1)


def test_consolidate_advances_by_since():
    updates = [Update("a", 1, 0, 1), Update("a", 1, 2, 1), Update("a", 1, 4, 1)]
    assert consolidate(updates, Antichain([3])) == [Update("a", 1, 3, 2), Update("a", 1, 4, 1)]


def test_columns_group_keys_and_values():
    batch = seal([("a", 1, 0, 1), ("a", 2, 0, 1), ("b", 1, 0, 1)], 0, 1)
    assert batch.keys == ["a", "b"]
    assert batch.vals == [1, 2, 1]
    assert batch.key_offs == [0, 2, 3]


def test_cursor_seeks_and_reads_histories():
    batch = seal([("a", 1, 0, 1), ("c", 1, 0, 2), ("e", 5, 0, -1)], 0, 1)
    counters = WorkCounters()
    cursor = batch.cursor(counters)
    cursor.seek_key("c")
    assert cursor.key() == "c"
    assert cursor.history() == [(0, 2)]
    cursor.seek_key("d")
    assert cursor.key() == "e"
    assert counters.cursor_steps > 0


def test_insert_must_be_contiguous():
    trace = Trace(int)
    trace.insert(seal([], 0, 1))
    with pytest.raises(DiscontiguousBatchError):
        trace.insert(seal([], 2, 3))


def test_merge_steps_are_bounded_by_fuel():
    older = seal([(k, 0, 0, 1) for k in range(50)], 0, 1)
    newer = seal([(k, 0, 1, 1) for k in range(50)], 1, 2)
    merge = InProgressMerge(older, newer, Antichain([0]))
    merge.step(10)
    assert not merge.done
    assert 10 <= merge.work <= 12
    result = merge.complete()
    assert len(result) == 100
    assert result.lower == Antichain([0]) and result.upper == Antichain([2])


def test_eager_merging_keeps_logarithmically_many_batches():
    trace = Trace(int, merge_effort=None)
    handle = TraceHandle(trace, 0)
    for epoch in range(64):
        trace.insert(seal([(epoch, 0, epoch, 1)], epoch, epoch + 1))
        assert trace.resident_batches() <= 2 * math.log2(epoch + 1) + 8
    assert trace.resident_updates() == 64
    handle.drop()


def test_lazy_merging_bounds_work_per_insert():
    trace = Trace(int, merge_effort=1)
    handle = TraceHandle(trace, 0)
    for epoch in range(200):
        batch = seal([(epoch, 0, epoch, 1), (epoch, 1, epoch, 1)], epoch, epoch + 1)
        trace.insert(batch)
        assert trace.last_insert_work <= len(batch) + 64
    handle.drop()


def test_compaction_coalesces_times_behind_since():
    trace = Trace(int, merge_effort=None)
    handle = TraceHandle(trace, 0)
    handle.set_since(Antichain([3]))
    trace.insert(seal([("k", "v", 0, 1)], 0, 1))
    trace.insert(seal([("k", "v", 1, 1)], 1, 2))
    assert trace.resident_updates() == 1
    for epoch in (2, 3):
        trace.insert(seal([], epoch, epoch + 1))
    assert handle.read_collection(3) == [("k", "v", 2)]
    with pytest.raises(InvalidReadError):
        handle.read_collection(1)
    with pytest.raises(InvalidReadError):
        handle.read_collection(4)


def test_handle_reads_accumulations():
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    trace.insert(seal([("k", 1, 0, 2), ("k", 2, 0, 1)], 0, 1))
    trace.insert(seal([("k", 1, 1, -2)], 1, 2))
    assert handle.read_accumulation("k", 0) == [(1, 2), (2, 1)]
    assert handle.read_accumulation("k", 1) == [(2, 1)]
    assert handle.read_accumulation("missing", 1) == []


def test_since_cannot_retreat():
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    handle.set_since(Antichain([4]))
    with pytest.raises(CompactionError):
        handle.set_since(Antichain([2]))


def test_compaction_cannot_pass_a_reader():
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    handle.set_since(Antichain([2]))
    with pytest.raises(CompactionError):
        trace.set_logical_compaction(Antichain([3]))
    trace.set_logical_compaction(Antichain([1]))
    assert trace.since == Antichain([1])
    handle.drop()


def test_churn_over_a_fixed_domain_stays_bounded():
    domain = 100
    generator = np.random.default_rng(5)
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    present: set[int] = set()
    peak = 0
    for epoch in range(500):
        updates = []
        for key in generator.integers(0, domain, size=40).tolist():
            diff = -1 if key in present else 1
            present.symmetric_difference_update({key})
            updates.append((key, (), epoch, diff))
        trace.insert(seal(updates, epoch, epoch + 1))
        handle.set_since(Antichain([epoch]))
        peak = max(peak, trace.resident_updates())
    assert peak <= 8 * domain
    assert sorted(key for key, _, _ in handle.read_collection(499)) == sorted(present)
    handle.drop()


def test_trace_compacts_to_the_meet_of_its_readers():
    trace = Trace(int)
    first = TraceHandle(trace, 0)
    second = first.clone()
    first.set_since(Antichain([5]))
    assert trace.since == Antichain([0])
    second.set_since(Antichain([3]))
    assert trace.since == Antichain([3])
    second.drop()
    assert trace.since == Antichain([5])
    first.drop()


def test_dropping_the_last_handle_releases_storage():
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    trace.insert(seal([("k", 1, 0, 1)], 0, 1))
    handle.drop()
    assert trace.resident_updates() == 0
    with pytest.raises(HandleDroppedError):
        handle.read_collection(0)
    trace.insert(seal([("k", 1, 1, 1)], 1, 2))
    assert trace.upper == Antichain([2])
    assert trace.resident_updates() == 0


def test_subscribers_see_every_batch():
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    queue = trace.subscribe()
    batches = [seal([("k", e, e, 1)], e, e + 1) for e in range(3)]
    for batch in batches:
        trace.insert(batch)
    assert list(queue) == batches
    handle.drop()


def test_checked_diff_arithmetic():
    with pytest.raises(DiffOverflowError):
        checked_add(I64_MAX, 1)


def test_routing_is_deterministic():
    assert fnv1a(b"") == 0xCBF29CE484222325
    assert route(12345, 1) == 0
    assert route(12345, 4) == route(12345, 4)
    assert {route(k, 4) for k in range(100)} == {0, 1, 2, 3}


def test_trace_suite_passes():
    assert run_suite(TRACE, seed=11, iterations=40).passed


def test_skipped_consolidation_is_caught_with_a_witness():
    report = run_suite(TRACE, seed=11, iterations=40, fault="skip-consolidation")
    assert not report.passed
    assert report.failure is not None
    assert report.failure.witness
    assert report.failure.minimal_case[0]["epochs"] >= 2
