"""Interactive queries against an evolving graph

With sharing, one dataflow arranges the edges by source and by target and
every query class is installed as its own dataflow importing those two
arrangements. Without sharing, each query dataflow receives its own copy of
the edge stream and builds the arrangements it reads privately.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

from loguru import logger

from shared_arrangements.arrangement.arrange import Arranged
from shared_arrangements.arrangement.handle import TraceHandle
from shared_arrangements.dataflow.input import Capture, InputHandle, Probe, accumulate
from shared_arrangements.dataflow.scope import Scope
from shared_arrangements.dataflow.worker import Cluster
from shared_arrangements.harness.driver import Arrivals, advance_all, open_loop, probes_passed, wait_for
from shared_arrangements.harness.edges import load_edges
from shared_arrangements.harness.generators import GraphChurn, QueryChurn, random_edges
from shared_arrangements.harness.latency import LatencyRecorder
from shared_arrangements.harness.queries import QUERIES, USES
from shared_arrangements.harness.results import ResultLog
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.models import GraphConfig, QueryClass
from shared_arrangements.operators.collection import Collection, new_input
from shared_arrangements.trace.spine import Trace

__all__ = ["GraphRun", "GraphSession", "graph"]

GRAPH_CLASS = "graph-update"


@dataclass
class _GraphShard:
    edges: InputHandle
    by_source: TraceHandle
    by_target: TraceHandle
    probe: Probe
    traces: list[Trace]


@dataclass
class _QueryShard:
    args: InputHandle
    edges: Optional[InputHandle]
    probe: Probe
    capture: Optional[Capture]
    traces: list[Trace] = field(default_factory=list)


def _arrange_edges(edges: Collection, prefix: str, uses: tuple[bool, bool]) -> tuple[Optional[Arranged], ...]:
    by_source = edges.arrange_by_key(f"{prefix}edges.by_source") if uses[0] else None
    by_target = None
    if uses[1]:
        by_target = edges.map(lambda src, dst: (dst, src), f"{prefix}edges.reverse").arrange_by_key(
            f"{prefix}edges.by_target"
        )
    return by_source, by_target


def _traces(*arranged: Optional[Arranged]) -> list[Trace]:
    return [a.handle.trace for a in arranged if a is not None]  # type: ignore[attr-defined]


class GraphSession:
    """A cluster with the edge dataflow and one dataflow per installed query class"""

    def __init__(self, workers: int, share: bool, queries: list[QueryClass], capture: bool = False) -> None:
        self.cluster = Cluster(workers)
        self.share = share
        self.queries = list(queries)
        self.capture = capture
        self.epoch = 0
        self.graph: list[_GraphShard] = []
        self.installed: dict[QueryClass, list[_QueryShard]] = {}
        self._offset = 0
        if share:
            self.graph = self.cluster.dataflow(self._build_graph, "graph.edges")
        for query in self.queries:
            self.installed[query] = self.cluster.dataflow(
                lambda scope, q=query: self._build_query(scope, q), f"graph.{query}"
            )
        logger.info(f"Installed {len(self.queries)} query classes on {workers} workers, sharing {share}")

    def _build_graph(self, scope: Scope) -> _GraphShard:
        edges_input, edges = new_input(scope, "edges")
        by_source, by_target = _arrange_edges(edges, "", (True, True))
        assert by_source is not None and by_target is not None
        return _GraphShard(
            edges=edges_input,
            by_source=by_source.handle.clone(),  # type: ignore[attr-defined]
            by_target=by_target.handle.clone(),  # type: ignore[attr-defined]
            probe=Probe(scope, by_source.stream, "edges.probe"),
            traces=_traces(by_source, by_target),
        )

    def _build_query(self, scope: Scope, query: QueryClass) -> _QueryShard:
        args_input, args = new_input(scope, f"{query}.args")
        edges_input = None
        if self.share:
            shard = self.graph[scope.worker_index]
            uses = USES[query]
            by_source = shard.by_source.import_into(scope, "edges.by_source") if uses[0] else None
            by_target = shard.by_target.import_into(scope, "edges.by_target") if uses[1] else None
            traces: list[Trace] = []
        else:
            edges_input, edges = new_input(scope, f"{query}.edges")
            by_source, by_target = _arrange_edges(edges, f"{query}.", USES[query])
            traces = _traces(by_source, by_target)
        result = QUERIES[query](args, by_source, by_target)
        return _QueryShard(
            args=args_input,
            edges=edges_input,
            probe=result.probe(f"{query}.probe"),
            capture=result.capture(f"{query}.capture") if self.capture else None,
            traces=traces,
        )

    # -- inputs ------------------------------------------------------------

    def edge_handles(self) -> list[InputHandle]:
        if self.share:
            return [shard.edges for shard in self.graph]
        return [shard.edges for shards in self.installed.values() for shard in shards if shard.edges is not None]

    def inputs(self) -> list[InputHandle]:
        args = [shard.args for shards in self.installed.values() for shard in shards]
        return self.edge_handles() + args

    def probes(self, query: Optional[QueryClass] = None) -> list[Probe]:
        if query is not None:
            return [shard.probe for shard in self.installed[query]]
        probes = [shard.probe for shards in self.installed.values() for shard in shards]
        return probes + [shard.probe for shard in self.graph]

    def update_edges(self, changes: list[tuple[tuple[int, int], int]]) -> None:
        workers = self.cluster.worker_count
        if self.share:
            for i, ((src, dst), diff) in enumerate(changes, start=self._offset):
                self.graph[i % workers].edges.insert(src, dst, diff)
        else:
            for shards in self.installed.values():
                for i, ((src, dst), diff) in enumerate(changes, start=self._offset):
                    shards[i % workers].edges.insert(src, dst, diff)  # type: ignore[union-attr]
        self._offset += len(changes)

    def update_args(self, query: QueryClass, changes: list[tuple[Any, int]]) -> None:
        shards = self.installed[query]
        for i, (argument, diff) in enumerate(changes, start=self._offset):
            shards[i % len(shards)].args.insert(argument, (), diff)
        self._offset += len(changes)

    # -- progress ------------------------------------------------------------

    def advance(self, epoch: int) -> None:
        advance_all(self.inputs(), epoch)
        self.epoch = epoch

    def settle(self) -> None:
        """Runs until every dataflow has caught up with the current epoch"""
        wait_for(self.cluster, {"all": lambda: probes_passed(self.probes(), self.epoch)})

    def compact(self, epoch: int) -> None:
        """Allows the shared edge traces to forget distinctions before ``epoch``"""
        frontier = Antichain([epoch])
        for shard in self.graph:
            for handle in (shard.by_source, shard.by_target):
                if frontier != handle.since and frontier.dominates(handle.since):
                    handle.set_since(frontier)

    # -- observation ---------------------------------------------------------

    def graph_traces(self) -> list[Trace]:
        if self.share:
            return [t for shard in self.graph for t in shard.traces]
        return [t for shards in self.installed.values() for shard in shards for t in shard.traces]

    def resident_graph_updates(self) -> int:
        return sum(t.resident_updates() for t in self.graph_traces())

    def outputs(self) -> dict[QueryClass, dict[tuple[Any, Any], int]]:
        """Each query class's accumulated output at the latest completed epoch"""
        latest = max(self.epoch - 1, 0)
        return {
            query: accumulate(Capture.gather(s.capture for s in shards if s.capture is not None), latest)
            for query, shards in self.installed.items()
        }

    def close(self) -> None:
        for handle in self.inputs():
            handle.close()
        self.cluster.quiesce()
        for shard in self.graph:
            shard.by_source.drop()
            shard.by_target.drop()
        self.cluster.close()


@dataclass
class GraphRun:
    recorder: LatencyRecorder
    outputs: dict[QueryClass, dict[tuple[Any, Any], int]]
    memory: list[tuple[str, int, int]]
    resident_graph_updates: int
    graph_traces: int
    saturated: bool = False


def _initial_edges(config: GraphConfig) -> tuple[list[tuple[int, int]], int]:
    if config.edge_file is not None:
        edges = load_edges(config.edge_file)
        nodes = max((max(s, d) for s, d in edges), default=-1) + 1
        return edges, max(nodes, 1)
    return random_edges(config.seed, config.nodes, config.edges), config.nodes


def graph(config: GraphConfig, results: Optional[ResultLog] = None, capture: bool = False) -> GraphRun:
    edges, nodes = _initial_edges(config)
    session = GraphSession(config.workers, config.share, config.queries, capture)
    session.update_edges([(edge, 1) for edge in edges])
    session.advance(1)
    session.settle()
    logger.info(f"Loaded {len(edges)} edges over {nodes} nodes")

    recorder = LatencyRecorder()
    churn = GraphChurn(config.seed, nodes, edges)
    arrivals = [
        Arrivals.for_duration(
            GRAPH_CLASS,
            config.rate,
            config.duration,
            lambda n: session.update_edges(churn.take(n)),
            session.probes(),
        )
    ]
    per_class = config.query_rate / max(len(config.queries), 1)
    for query in config.queries:
        arguments = QueryChurn(config.seed, query, nodes, config.concurrent, pairs=query == "four-path")
        arrivals.append(
            Arrivals.for_duration(
                query,
                per_class,
                config.duration,
                lambda n, q=query, a=arguments: session.update_args(q, a.take(n)),
                session.probes(query),
            )
        )

    def on_epoch(epoch: int) -> None:
        session.epoch = epoch
        session.compact(epoch)

    stats = open_loop(
        session.cluster, arrivals, session.inputs(), config.duration, recorder, first_epoch=2, on_epoch=on_epoch
    )

    traces = session.graph_traces()
    run = GraphRun(
        recorder=recorder,
        outputs=session.outputs() if capture else {},
        memory=[(t.name, t.resident_updates(), t.resident_batches()) for t in traces],
        resident_graph_updates=session.resident_graph_updates(),
        graph_traces=len({t.name.rsplit("@", 1)[0] for t in traces}),
        saturated=stats.saturated,
    )
    session.close()
    logger.info(
        f"graph: {run.resident_graph_updates} resident graph updates in {run.graph_traces} arrangements "
        f"(sharing {config.share})"
    )
    if results is not None:
        _write(results, run)
    return run


def _write(results: ResultLog, run: GraphRun) -> None:
    results.latencies(run.recorder)
    for name, updates, batches in run.memory:
        results.memory(name, updates, batches)
    results.work("resident_graph_updates", run.resident_graph_updates)
    results.work("graph_arrangements", run.graph_traces)
    results.work("saturated", int(run.saturated))
