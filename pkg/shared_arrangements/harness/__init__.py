from shared_arrangements.harness.bench_arrange import ArrangeRun, bench_arrange
from shared_arrangements.harness.bench_join import JoinMeasurement, bench_join
from shared_arrangements.harness.edges import load_edges, parse_edges
from shared_arrangements.harness.graph import GraphRun, GraphSession, graph
from shared_arrangements.harness.graph_batch import BatchResult, datalog_tc, graph_batch
from shared_arrangements.harness.latency import LatencyRecorder, ccdf
from shared_arrangements.harness.results import ResultLog

__all__ = [
    "ArrangeRun",
    "BatchResult",
    "GraphRun",
    "GraphSession",
    "JoinMeasurement",
    "LatencyRecorder",
    "ResultLog",
    "bench_arrange",
    "bench_join",
    "ccdf",
    "datalog_tc",
    "graph",
    "graph_batch",
    "load_edges",
    "parse_edges",
]
