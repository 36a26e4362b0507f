import pytest

from shared_arrangements.arrangement import TraceHandle
from shared_arrangements.dataflow import Capture, Cluster, accumulate
from shared_arrangements.errors import HandleDroppedError, WorkerMismatchError
from shared_arrangements.lattice import Antichain
from shared_arrangements.operators import new_input
from shared_arrangements.trace import BatchBuilder, Trace, Update


def build_records(scope):
    records_input, records = new_input(scope, "records")
    arranged = records.arrange_by_key("records")
    counts = arranged.count("counts").as_collection()
    return records_input, arranged.handle.clone(), counts.capture("counts")


def load(cluster, shards, records, epoch):
    for i, (key, val) in enumerate(records):
        shards[i % len(shards)][0].insert(key, val)
    for records_input, _, _ in shards:
        records_input.advance_to(epoch)
    cluster.quiesce()


def test_handle_reads_the_arranged_collection(workers):
    with Cluster(workers) as cluster:
        shards = cluster.dataflow(build_records)
        load(cluster, shards, [("a", 1), ("a", 2), ("b", 1)], 1)
        read = sorted(record for _, handle, _ in shards for record in handle.read_collection(0))
        assert read == [("a", 1, 1), ("a", 2, 1), ("b", 1, 1)]
        assert all(len(handle.trace.writers) == 1 for _, handle, _ in shards)


def test_imported_arrangement_matches_its_source(workers):
    with Cluster(workers) as cluster:
        shards = cluster.dataflow(build_records)
        load(cluster, shards, [(k % 7, k) for k in range(40)], 1)

        def build_import(scope):
            imported = shards[scope.worker_index][1].import_into(scope, "records.import")
            return imported.count("import.count").as_collection().capture("import.count")

        imports = cluster.dataflow(build_import)
        cluster.quiesce()
        source = accumulate(Capture.gather(c for _, _, c in shards), 0)
        assert accumulate(Capture.gather(imports), 0) == source
        assert source == {(k, len(range(k, 40, 7))): 1 for k in range(7)}

        load(cluster, shards, [(0, 100), (8, 0)], 2)
        cluster.quiesce()
        source = accumulate(Capture.gather(c for _, _, c in shards), 1)
        assert accumulate(Capture.gather(imports), 1) == source
        assert (0, 7) in source and (8, 1) in source


def test_late_import_sees_compacted_history():
    with Cluster(1) as cluster:
        shards = cluster.dataflow(build_records)
        for epoch in range(1, 5):
            load(cluster, shards, [("k", epoch)], epoch)
        handle = shards[0][1]
        handle.set_since(Antichain([3]))
        imports = cluster.dataflow(lambda scope: handle.import_into(scope).as_collection().capture())
        cluster.quiesce()
        assert accumulate(imports[0].updates, 3) == {("k", v): 1 for v in range(1, 5)}


def test_import_is_worker_local():
    with Cluster(2) as cluster:
        shards = cluster.dataflow(build_records)
        with pytest.raises(WorkerMismatchError):
            cluster.dataflow(lambda scope: shards[0][1].import_into(scope))


def test_construction_handles_expire_after_build():
    with Cluster(1) as cluster:
        kept = []

        def build(scope):
            records_input, records = new_input(scope)
            arranged = records.arrange_by_key("unshared")
            kept.append(arranged.handle)
            return records_input

        inputs = cluster.dataflow(build)
        inputs[0].insert("a", 1)
        inputs[0].advance_to(1)
        cluster.quiesce()
        assert kept[0].dropped
        assert kept[0].trace.resident_updates() == 0
        with pytest.raises(HandleDroppedError):
            kept[0].read_collection(0)


def test_cloned_handles_are_independent_readers():
    with Cluster(1) as cluster:
        shards = cluster.dataflow(build_records)
        load(cluster, shards, [("a", 1)], 1)
        load(cluster, shards, [], 2)
        handle = shards[0][1]
        readers = handle.trace.reader_count
        with handle.clone() as other:
            other.set_since(Antichain([1]))
            assert handle.since == Antichain([0])
            assert other.read_collection(1) == [("a", 1, 1)]
        assert other.dropped
        assert handle.trace.reader_count == readers


def test_filtered_arrangement_shares_the_trace():
    with Cluster(1) as cluster:

        def build(scope):
            records_input, records = new_input(scope, "records")
            arranged = records.arrange_by_key("records")
            large = arranged.filter(lambda key, val: val > 1)
            return records_input, large.as_collection().capture(), large.count("large.count").as_collection().capture()

        ((records_input, filtered, counted),) = cluster.dataflow(build)
        for key, val in [("a", 1), ("a", 2), ("a", 3), ("b", 0)]:
            records_input.insert(key, val)
        records_input.close()
        cluster.quiesce()
        assert filtered.accumulate(0) == {("a", 2): 1, ("a", 3): 1}
        assert counted.accumulate(0) == {("a", 2): 1}


def test_accumulations_follow_the_collection_history():
    trace = Trace(int)
    handle = TraceHandle(trace, 0)
    history = [
        (342, ("Company LLC", "USA"), 4350, 1),
        (563, ("Firma GmbH", "Deutschland"), 4355, 1),
        (225, ("Azienda SRL", "Italia"), 4360, 1),
        (225, ("Azienda SRL", "Italia"), 6200, -1),
        (225, ("Company Ltd", "UK"), 6220, 1),
    ]
    batch = BatchBuilder(int).extend(Update(*u) for u in history).seal(Antichain([0]), Antichain([7000]))
    trace.insert(batch)
    assert sorted(handle.read_collection(4360)) == [
        (225, ("Azienda SRL", "Italia"), 1),
        (342, ("Company LLC", "USA"), 1),
        (563, ("Firma GmbH", "Deutschland"), 1),
    ]
    assert handle.read_accumulation(225, 6230) == [(("Company Ltd", "UK"), 1)]
    assert handle.read_accumulation(342, 6230) == [(("Company LLC", "USA"), 1)]
    handle.drop()
