from collections import Counter

import pytest

from shared_arrangements.dataflow import Cluster
from shared_arrangements.errors import IterationLimitError
from shared_arrangements.harness.graph_batch import datalog_tc, graph_batch
from shared_arrangements.harness.verify import DETERMINISM, OPERATORS, run_suite
from shared_arrangements.harness.verify.dataflows import expected_operators, run_operators
from shared_arrangements.lattice import Product
from shared_arrangements.operators import new_input
from tests.oracles import collection_at, counts, distinct, join, min_values, reachable, run_static, transitive_sizes

LEFT = [(k % 4, k % 3) for k in range(12)] + [(9, 1)]
RIGHT = [(0, "x"), (1, "y"), (1, "z"), (7, "w")]


def records(pairs):
    return collection_at([(k, v, 0, 1) for k, v in pairs], 0)


def least(key, values):
    return [(min(v for v, _ in values), 1)]


def test_count(workers):
    assert run_static(lambda c: c.count(), {"left": LEFT}, workers) == counts(records(LEFT))


def test_distinct(workers):
    assert run_static(lambda c: c.distinct(), {"left": LEFT}, workers) == distinct(records(LEFT))


def test_join(workers):
    result = run_static(lambda a, b: a.join(b, lambda k, x, y: (k, (x, y))), {"left": LEFT, "right": RIGHT}, workers)
    assert result == join(records(LEFT), records(RIGHT))


def test_join_with_a_shared_arrangement(workers):
    def logic(a, b):
        shared = b.arrange_by_key("right")
        return a.join_arranged(shared, lambda k, x, y: (k, (x, y))).concat(
            a.map(lambda k, x: (k, x * 10)).join_arranged(shared, lambda k, x, y: (k, (x, y)), name="tens")
        )

    result = run_static(logic, {"left": LEFT, "right": RIGHT}, workers)
    tens = [(k, v * 10) for k, v in LEFT]
    expected = Counter(join(records(LEFT), records(RIGHT))) + Counter(join(records(tens), records(RIGHT)))
    assert result == dict(expected)


def test_reduce_to_minimum(workers):
    assert run_static(lambda c: c.reduce(least).as_collection(), {"left": LEFT}, workers) == min_values(records(LEFT))


def test_reach(workers, chain_edges):
    result = graph_batch("reach", chain_edges + [(7, 8)], workers, root=2)
    assert result.records == {(node, ()): 1 for node in reachable(chain_edges, [2])}
    assert result.summary["reached"] == 4


def test_sssp(workers, chain_edges):
    result = graph_batch("sssp", chain_edges + [(1, 3)], workers, root=1)
    assert result.records == {(1, 0): 1, (2, 1): 1, (3, 1): 1, (4, 2): 1, (5, 3): 1}
    assert result.summary["max_distance"] == 3


def test_wcc(workers):
    result = graph_batch("wcc", [(1, 2), (3, 2), (5, 6)], workers)
    assert result.records == {(1, 1): 1, (2, 1): 1, (3, 1): 1, (5, 5): 1, (6, 5): 1}
    assert result.summary["components"] == 2


def test_root_defaults_to_the_first_source(chain_edges):
    assert graph_batch("reach", chain_edges).summary["root"] == 1


@pytest.mark.parametrize(
    "edges, sources, expected",
    [
        ([(1, 2), (2, 3)], [1, 2, 3], {1: 2, 2: 1, 3: 0}),
        ([(1, 2), (2, 1)], [1], {1: 2}),
        ([], [4], {4: 0}),
    ],
    ids=["chain", "cycle", "empty"],
)
def test_transitive_closure_sizes(workers, edges, sources, expected):
    result = datalog_tc(edges, sources, workers)
    assert result.summary["reachable"] == expected == transitive_sizes(edges, sources)


def test_iteration_without_a_fixed_point_fails():
    def climb(collection):
        return collection.map(lambda k, v: (k, v + 1))

    with pytest.raises(IterationLimitError):
        run_static(lambda c: c.iterate(climb, max_rounds=5), {"left": [("a", 0)]})


def test_reduce_corrects_at_the_lub_of_input_times():
    def build(scope):
        records_input, records = new_input(scope.iterative("rounds"), "records")
        return records_input, records.reduce(least).as_collection().capture("least")

    with Cluster(1) as cluster:
        [(records_input, capture)] = cluster.dataflow(build)
        records_input.insert("k", 2, time=Product(1, 0))
        records_input.insert("k", 1, time=Product(0, 1))
        records_input.close()
        cluster.quiesce()
        output = {(u.key, u.val, u.time): u.diff for u in capture.consolidated()}
    assert output == {
        ("k", 2, Product(1, 0)): 1,
        ("k", 1, Product(0, 1)): 1,
        ("k", 2, Product(1, 1)): -1,
    }


def test_outputs_follow_retractions_across_epochs(workers):
    items = [
        ("a", 1, 5, 0, 1),
        ("a", 1, 3, 1, 1),
        ("a", 1, 3, 2, -1),
        ("a", 2, 4, 0, 1),
        ("a", 2, 4, 1, -1),
        ("b", 1, 1, 0, 1),
        ("b", 2, 2, 2, 1),
    ]
    observed = run_operators(workers, 3, items)
    assert observed == [expected_operators(items, epoch) for epoch in range(3)]
    assert observed[1]["min"] == {(1, 3): 1}
    assert observed[2]["min"] == {(1, 5): 1}
    assert observed[1]["join"] == {(1, (5, 1)): 1, (1, (3, 1)): 1}
    assert observed[2]["count"] == {(1, 1): 1}


def test_operators_suite_passes():
    report = run_suite(OPERATORS, seed=7, iterations=20)
    assert report.passed, report.failure


def test_outputs_do_not_depend_on_worker_count():
    report = run_suite(DETERMINISM, seed=7, iterations=5)
    assert report.passed, report.failure
