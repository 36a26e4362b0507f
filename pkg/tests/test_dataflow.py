import pytest

from shared_arrangements.dataflow import Capture, Cluster, accumulate
from shared_arrangements.errors import ProgressViolationError, ScopeError
from shared_arrangements.lattice import Antichain
from shared_arrangements.operators import new_input
from shared_arrangements.trace import route


def build_pipeline(scope):
    records_input, records = new_input(scope, "records")
    doubled = records.map(lambda k, v: (k, v * 2)).filter(lambda k, v: v > 0)
    return records_input, doubled.probe(), doubled.capture()


def test_input_rejects_time_travel():
    with Cluster(1) as cluster:
        ((records_input, _, _),) = cluster.dataflow(build_pipeline)
        records_input.advance_to(3)
        with pytest.raises(ProgressViolationError):
            records_input.insert("a", 1, time=2)
        with pytest.raises(ProgressViolationError):
            records_input.advance_to(1)
        records_input.close()
        with pytest.raises(ProgressViolationError):
            records_input.insert("a", 1)


def test_probe_tracks_the_input_frontier():
    with Cluster(1) as cluster:
        ((records_input, probe, capture),) = cluster.dataflow(build_pipeline)
        records_input.insert("a", 1)
        records_input.insert("b", -1)
        records_input.advance_to(1)
        cluster.quiesce()
        assert probe.frontier() == Antichain([1])
        assert not probe.less_than(1)
        assert probe.less_equal(1)
        assert capture.accumulate(0) == {("a", 2): 1}

        records_input.remove("a", 1)
        records_input.close()
        cluster.quiesce()
        assert probe.done()
        assert capture.accumulate(1) == {}


def test_explicit_times_and_batches():
    with Cluster(1) as cluster:
        ((records_input, probe, capture),) = cluster.dataflow(build_pipeline)
        records_input.send_batch([("a", 1, 2, 1), ("b", 1, 0, 3)])
        records_input.advance_to(3)
        cluster.run_until(lambda: not probe.less_than(3))
        assert capture.accumulate(1) == {("b", 2): 3}
        assert capture.accumulate(2) == {("a", 2): 1, ("b", 2): 3}


def test_concat_and_negate_cancel():
    with Cluster(1) as cluster:

        def build(scope):
            records_input, records = new_input(scope)
            return records_input, records.concat(records.negate()).consolidate().capture()

        ((records_input, capture),) = cluster.dataflow(build)
        records_input.insert("a", 1)
        records_input.close()
        cluster.quiesce()
        assert capture.consolidated() == []


def test_exchange_routes_by_key():
    with Cluster(4) as cluster:

        def build(scope):
            records_input, records = new_input(scope)
            return records_input, records.exchange().capture()

        shards = cluster.dataflow(build)
        for key in range(20):
            shards[0][0].insert(key)
        for records_input, _ in shards:
            records_input.close()
        cluster.quiesce()
        for index, (_, capture) in enumerate(shards):
            assert all(route(u.key, 4) == index for u in capture.updates)
        assert sum(len(capture.updates) for _, capture in shards) == 20


def test_collections_stay_in_their_scope():
    with Cluster(1) as cluster:

        def build(scope):
            _, records = new_input(scope)
            records.leave()

        with pytest.raises(ScopeError):
            cluster.dataflow(build)


def test_cluster_needs_a_worker():
    with pytest.raises(ValueError):
        Cluster(0)


@pytest.mark.parametrize("threaded", [False, True])
def test_counts_agree_across_worker_counts(threaded):
    records = [(k % 5, k) for k in range(30)]
    results = []
    for workers in (1, 2, 4):
        with Cluster(workers, threaded=threaded) as cluster:

            def build(scope):
                records_input, collection = new_input(scope)
                counts = collection.count()
                return records_input, counts.capture()

            shards = cluster.dataflow(build)
            for i, (key, val) in enumerate(records):
                shards[i % workers][0].insert(key, val)
            for records_input, _ in shards:
                records_input.close()
            cluster.quiesce()
            results.append(accumulate(Capture.gather(c for _, c in shards), 0))
    assert results[0] == {(k, 6): 1 for k in range(5)}
    assert results[0] == results[1] == results[2]


def test_counters_record_work():
    with Cluster(1) as cluster:

        def build(scope):
            records_input, collection = new_input(scope)
            collection.count().probe()
            return records_input

        (records_input,) = cluster.dataflow(build)
        for key in range(10):
            records_input.insert(key)
        records_input.close()
        cluster.quiesce()
        assert cluster.counters().reduce_evaluations >= 10
        cluster.reset_counters()
        assert cluster.counters().reduce_evaluations == 0


def test_arranged_operators_pass_frontiers_through(workers):
    def build(scope):
        records_input, records = new_input(scope, "records")
        counted = records.concat(records.map(lambda k, v: (k, v + 1))).count()
        return records_input, counted.probe(), counted.capture()

    with Cluster(workers) as cluster:
        shards = cluster.dataflow(build)
        shards[0][0].insert("a", 1)
        for records_input, _, _ in shards:
            records_input.advance_to(3)
        cluster.quiesce()
        assert all(probe.frontier() == Antichain([3]) for _, probe, _ in shards)
        assert accumulate(Capture.gather(capture for _, _, capture in shards), 2) == {("a", 2): 1}
