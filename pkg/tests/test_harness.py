import csv
import json

import pytest

from shared_arrangements.errors import EdgeFileError
from shared_arrangements.harness import GraphSession, ResultLog, bench_arrange, bench_join, ccdf, graph, parse_edges
from shared_arrangements.harness.bench_join import record_value
from shared_arrangements.harness.graph import GRAPH_CLASS
from shared_arrangements.harness.latency import FLOOR_NS, LatencyRecorder
from shared_arrangements.harness.verify import SHARING, run_suite, verify
from shared_arrangements.models import ALL_QUERIES, GraphConfig, WorkloadConfig
from shared_arrangements.run import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from tests.oracles import four_path, two_hop


def test_parse_edges_skips_comments_and_blanks():
    lines = ["# a comment", "", "1 2", "  3\t4  "]
    assert list(parse_edges(lines)) == [(1, 2), (3, 4)]


@pytest.mark.parametrize("line", ["1", "1 2 3", "a b"])
def test_parse_edges_reports_the_bad_line(line):
    with pytest.raises(EdgeFileError) as excinfo:
        list(parse_edges(["1 2", line], "graph.txt"))
    assert excinfo.value.line == 2
    assert excinfo.value.path == "graph.txt"


def test_ccdf():
    assert ccdf([1, 2, 2, 3]) == [(1, 0.75), (2, 0.25), (3, 0.0)]
    assert ccdf([]) == []


def test_latency_recorder_floors_samples():
    recorder = LatencyRecorder()
    assert recorder.record("q", 10) == FLOOR_NS
    recorder.record("q", 5 * FLOOR_NS)
    assert recorder.count("q") == 2
    assert recorder.percentile("q", 100) == 5 * FLOOR_NS
    assert recorder.ccdf("q") == [(FLOOR_NS, 0.5), (5 * FLOOR_NS, 0.0)]


def test_worker_recorders_merge():
    first, second = LatencyRecorder(), LatencyRecorder()
    first.record("q", 2 * FLOOR_NS)
    second.record("q", 3 * FLOOR_NS)
    second.record("r", FLOOR_NS)
    merged = first.merge(second)
    assert merged is first
    assert merged.samples == {"q": [2 * FLOOR_NS, 3 * FLOOR_NS], "r": [FLOOR_NS]}


def test_result_log_writes_latency_ccdf(tmp_path):
    recorder = LatencyRecorder()
    for sample in (FLOOR_NS, FLOOR_NS, 4 * FLOOR_NS, 8 * FLOOR_NS):
        recorder.record("lookup", sample)
    prefix = str(tmp_path / "run")
    results = ResultLog(prefix, "test")
    results.latencies(recorder)
    results.close()

    with open(f"{prefix}.ccdf.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["query_class", "latency_ns", "fraction_greater"]
    assert [(int(ns), float(fraction)) for _, ns, fraction in rows[1:]] == [
        (FLOOR_NS, 0.5),
        (4 * FLOOR_NS, 0.25),
        (8 * FLOOR_NS, 0.0),
    ]
    with open(f"{prefix}.summary.json") as f:
        summary = json.load(f)
    assert summary["latency"]["lookup"]["samples"] == 4
    assert summary["latency"]["lookup"]["max_ns"] == 8 * FLOOR_NS
    assert summary["files"]["ccdf"] == f"{prefix}.ccdf.csv"


def test_result_log_writes_csv_and_summary(tmp_path):
    prefix = str(tmp_path / "out" / "run")
    results = ResultLog(prefix, "test")
    results.latency("lookup", 1_500_000)
    results.memory("edges@0", 10, 2)
    results.work("merge_work", 42)
    results.close({"workers": 2})

    with open(f"{prefix}.latency.csv") as f:
        assert list(csv.reader(f)) == [["query_class", "latency_ns"], ["lookup", "1500000"]]
    with open(f"{prefix}.memory.csv") as f:
        assert next(csv.reader(f)) == ["trace_name", "resident_updates", "resident_batches"]
    with open(f"{prefix}.summary.json") as f:
        summary = json.load(f)
    assert summary["command"] == "test"
    assert summary["workers"] == 2
    assert summary["rows"] == {"latency": 1, "memory": 1, "work": 1}


@pytest.fixture
def session(request, chain_edges):
    share = getattr(request, "param", True)
    session = GraphSession(1, share, list(ALL_QUERIES), capture=True)
    session.update_edges([(edge, 1) for edge in chain_edges])
    yield session
    session.close()


@pytest.mark.parametrize("session", [True, False], indirect=True, ids=["shared", "private"])
def test_graph_queries(session, chain_edges):
    session.update_args("lookup", [(1, 1)])
    session.update_args("one-hop", [(1, 1)])
    session.update_args("two-hop", [(1, 1)])
    session.update_args("four-path", [((1, 5), 1)])
    session.advance(1)
    session.settle()
    outputs = session.outputs()
    assert outputs["lookup"] == {(1, 1): 1}
    assert outputs["one-hop"] == {(1, 2): 1}
    assert outputs["two-hop"] == {(1, dst): 1 for dst in two_hop(chain_edges, 1)}
    assert outputs["four-path"] == {((1, 5), four_path(chain_edges, 1, 5)): 1}


def test_graph_queries_follow_edge_changes(session):
    session.update_args("four-path", [((1, 5), 1)])
    session.advance(1)
    session.settle()
    assert session.outputs()["four-path"] == {((1, 5), 4): 1}

    session.update_edges([((1, 4), 1)])
    session.advance(2)
    session.settle()
    assert session.outputs()["four-path"] == {((1, 5), 2): 1}

    session.update_edges([((1, 4), -1), ((4, 5), -1)])
    session.advance(3)
    session.settle()
    assert session.outputs()["four-path"] == {}


def test_sharing_reduces_resident_edges(chain_edges):
    resident = {}
    for share in (True, False):
        session = GraphSession(1, share, list(ALL_QUERIES))
        session.update_edges([(edge, 1) for edge in chain_edges])
        session.advance(1)
        session.settle()
        resident[share] = session.resident_graph_updates()
        session.close()
    assert resident[True] == 2 * len(chain_edges)
    assert resident[False] / resident[True] == 2.5


def test_graph_workload(tmp_path):
    config = GraphConfig(nodes=20, edges=40, rate=200, query_rate=200, duration=0.2, concurrent=3, workers=2)
    results = ResultLog(str(tmp_path / "graph"), "graph")
    run = graph(config, results, capture=True)
    results.close()
    assert run.graph_traces == 2
    assert set(run.outputs) == set(ALL_QUERIES)
    assert results.row_counts["work"] == 3
    assert set(results.latency_summary) == set(ALL_QUERIES) | {GRAPH_CLASS}
    assert results.row_counts["ccdf"] >= len(results.latency_summary)


def test_bench_join_output_tracks_batch_size():
    measurements = bench_join(200, [1, 10, 100], capture=True)
    assert [m.join_outputs for m in measurements] == [1, 10, 100]
    for m in measurements:
        assert len(m.output) == m.batch_size
        assert all(u.val == record_value(u.key) and u.diff == 1 for u in m.output)
    assert measurements[0].cursor_steps < measurements[2].cursor_steps


def test_bench_join_rejects_oversized_batches():
    with pytest.raises(ValueError):
        bench_join(10, [100])


def test_bench_arrange_counts_what_it_sent():
    config = WorkloadConfig(keys=50, batch_size=100, duration=0.1)
    run = bench_arrange(config, "throughput", capture=True)
    assert run.updates_sent >= 100
    assert run.peak_throughput > 0
    assert run.output
    assert {name.rsplit("@", 1)[0] for name, _, _ in run.memory} == {"keys.arranged", "keys.count"}


def test_sharing_suite_catches_skipped_consolidation():
    report = run_suite(SHARING, seed=0, iterations=30, fault="skip-consolidation")
    assert not report.passed
    assert report.failure is not None and report.failure.witness


def test_verify_rejects_unknown_suites():
    with pytest.raises(ValueError):
        verify("nonexistent", 0, 1)
    with pytest.raises(ValueError):
        verify("lattice", 0, 1, "flip-bits")


@pytest.fixture
def edge_file(tmp_path, chain_edges):
    path = tmp_path / "edges.txt"
    path.write_text("# chain\n" + "".join(f"{s} {d}\n" for s, d in chain_edges))
    return str(path)


def test_cli_graph_batch(edge_file, capsys):
    assert main(["graph-batch", "--task", "reach", "--edges", edge_file]) == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    assert printed["task"] == "reach"
    assert printed["reached"] == 5


def test_cli_datalog_tc(edge_file, capsys):
    assert main(["datalog-tc", "--edges", edge_file, "--sources", "1,4"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[:2] == ["1\t4", "4\t1"]


def test_cli_verify(capsys):
    assert main(["verify", "--suite", "lattice", "--iters", "5"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["cases"] == 5
    assert main(["verify", "--suite", "trace", "--iters", "40", "--inject-fault", "skip-consolidation"]) == EXIT_FAILED


def test_cli_usage_errors(tmp_path):
    assert main([]) == EXIT_USAGE
    assert main(["graph-batch", "--random", "7"]) == EXIT_USAGE
    assert main(["graph-batch", "--edges", str(tmp_path / "missing.txt")]) == EXIT_USAGE
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\nthree four\n")
    assert main(["graph-batch", "--edges", str(bad)]) == EXIT_USAGE
    assert main(["verify", "--suite", "nonexistent"]) == EXIT_USAGE
