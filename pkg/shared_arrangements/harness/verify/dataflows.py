"""Whole dataflows checked against brute force at every epoch

- ``sharing``: a second dataflow importing a live arrangement agrees with the
  first, subscribers only ever see consolidated batches, and a trace whose
  last handle is dropped gives up its storage without disturbing its stream
- ``operators``: count, distinct, join, min and reachability over two
  evolving inputs, the last iterating within every epoch
- ``determinism``: the same inputs give the same outputs for any number of
  workers, and graph queries answer alike with and without sharing
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from shared_arrangements.arrangement.handle import TraceHandle
from shared_arrangements.dataflow.input import Capture, InputHandle, Probe, accumulate
from shared_arrangements.dataflow.scope import Scope
from shared_arrangements.dataflow.worker import Cluster
from shared_arrangements.harness.driver import advance_all, probes_passed, wait_for
from shared_arrangements.harness.graph import GraphSession
from shared_arrangements.harness.graph_batch import reach
from shared_arrangements.harness.verify import oracle
from shared_arrangements.harness.verify.runner import Case, Counterexample, Suite
from shared_arrangements.harness.verify.trace import check_consolidated
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.models import ALL_QUERIES
from shared_arrangements.operators.collection import new_input

__all__ = ["DETERMINISM", "OPERATORS", "SHARING", "expected_operators", "run_operators"]

WORKER_COUNTS = (1, 2, 4)


def _nonnegative(updates: list[tuple[Any, Any, int, int]], epochs: int) -> bool:
    return all(c > 0 for t in range(epochs) for c in oracle.collection_at(updates, t).values())


def _churn(generator: np.random.Generator, epochs: int, sources: tuple[str, ...], size: int) -> list[tuple]:
    """Insertions, some retracted in the same or a later epoch"""
    items: list[tuple] = []
    for _ in range(int(generator.integers(1, size))):
        source = sources[int(generator.integers(len(sources)))]
        key, val = int(generator.integers(0, 6)), int(generator.integers(0, 6))
        epoch = int(generator.integers(0, epochs))
        items.append((source, key, val, epoch, 1))
        if generator.random() < 0.3:
            items.append((source, key, val, int(generator.integers(epoch, epochs)), -1))
    return items


def _updates(items: list[tuple], source: str) -> list[tuple[Any, Any, int, int]]:
    return [(key, val, t, diff) for s, key, val, t, diff in items if s == source]


def _settle(cluster: Cluster, probes: list[Probe], epoch: int) -> None:
    wait_for(cluster, {f"epoch {epoch}": lambda: probes_passed(probes, epoch)})


# -- sharing ---------------------------------------------------------------


@dataclass
class _SharingShard:
    records: InputHandle
    shared: TraceHandle
    weak: TraceHandle
    subscribed: Any
    counts: Capture
    weak_stream: Capture
    probes: list[Probe]


def _build_sharing(scope: Scope) -> _SharingShard:
    records_input, records = new_input(scope, "records")
    shared = records.arrange_by_key("shared")
    weak = records.arrange_by_key("weak")
    counts = shared.count("shared.count").as_collection()
    weak_stream = weak.as_collection(name="weak.stream")
    return _SharingShard(
        records=records_input,
        shared=shared.handle.clone(),  # type: ignore[attr-defined]
        weak=weak.handle.clone(),  # type: ignore[attr-defined]
        subscribed=shared.handle.trace.subscribe(),  # type: ignore[attr-defined]
        counts=counts.capture("shared.count"),
        weak_stream=weak_stream.capture("weak.stream"),
        probes=[counts.probe("shared.probe"), weak_stream.probe("weak.probe")],
    )


def _generate_sharing(generator: np.random.Generator) -> Case:
    epochs = int(generator.integers(3, 7))
    params = {
        "workers": int(generator.choice([1, 2])),
        "epochs": epochs,
        "import_at": int(generator.integers(1, epochs)),
        "drop_at": int(generator.integers(1, epochs)),
    }
    return params, _churn(generator, epochs, ("records",), 60)


def _valid_sharing(params: dict[str, Any], items: list) -> bool:
    return _nonnegative(_updates(items, "records"), params["epochs"])


def _check_sharing(params: dict[str, Any], items: list) -> None:
    workers, epochs = params["workers"], params["epochs"]
    updates = _updates(items, "records")
    with Cluster(workers) as cluster:
        shards = cluster.dataflow(_build_sharing, "sharing.a")
        importers: list[Capture] = []
        probes = [p for shard in shards for p in shard.probes]

        def build_import(scope: Scope) -> Capture:
            imported = shards[scope.worker_index].shared.import_into(scope, "shared.import")
            counts = imported.count("import.count").as_collection()
            probes.append(counts.probe("import.probe"))
            return counts.capture("import.count")

        for epoch in range(epochs):
            if epoch == params["import_at"]:
                importers = cluster.dataflow(build_import, "sharing.b")
            if epoch == params["drop_at"]:
                for shard in shards:
                    shard.weak.drop()
            for i, (key, val, t, diff) in enumerate(updates):
                if t == epoch:
                    shards[i % workers].records.insert(key, val, diff)
            advance_all((shard.records for shard in shards), epoch + 1)
            _settle(cluster, probes, epoch + 1)

            for shard in shards:
                while shard.subscribed:
                    check_consolidated(shard.subscribed.popleft())
                writers = shard.shared.trace.writers
                if len(writers) != 1:
                    raise Counterexample(f"shared trace mutated by {len(writers)} writers", [epoch])
                shard.shared.set_since(Antichain([epoch]))

            expected = oracle.counts(oracle.collection_at(updates, epoch))
            counted = accumulate(Capture.gather(s.counts for s in shards), epoch)
            if counted != expected:
                raise Counterexample(f"count at {epoch} is {counted}, expected {expected}", [epoch])
            if importers:
                imported = accumulate(Capture.gather(importers), epoch)
                if imported != counted:
                    raise Counterexample(
                        f"importing dataflow counted {imported} at {epoch}, its source {counted}", [epoch]
                    )
            if epoch >= params["drop_at"]:
                resident = sum(shard.weak.trace.resident_updates() for shard in shards)
                if resident:
                    raise Counterexample(f"{resident} updates remain after every weak handle was dropped", [epoch])
            streamed = accumulate(Capture.gather(s.weak_stream for s in shards), epoch)
            if streamed != oracle.collection_at(updates, epoch):
                raise Counterexample(f"weak stream at {epoch} is {streamed}", [epoch])

        for shard in shards:
            shard.records.close()
            shard.shared.drop()
        cluster.quiesce()


SHARING = Suite("sharing", _generate_sharing, _check_sharing, _valid_sharing)


# -- operators ---------------------------------------------------------------


@dataclass
class _OperatorShard:
    a: InputHandle
    b: InputHandle
    outputs: dict[str, Capture] = field(default_factory=dict)
    probes: list[Probe] = field(default_factory=list)


def _least(key: Any, values: list[tuple[Any, int]]) -> list[tuple[Any, int]]:
    return [(min(val for val, _ in values), 1)]


def _build_operators(scope: Scope) -> _OperatorShard:
    a_input, a = new_input(scope, "a")
    b_input, b = new_input(scope, "b")
    roots = b.map(lambda key, _: (key, ()), "roots").distinct("roots.distinct")
    outputs = {
        "count": a.count("count"),
        "distinct": a.distinct("distinct"),
        "join": a.join(b, lambda key, x, y: (key, (x, y)), name="join"),
        "min": a.reduce(_least, "min").as_collection(),
        "reach": reach(a.arrange_by_key("edges"), roots),
    }
    shard = _OperatorShard(a_input, b_input)
    for name, collection in outputs.items():
        shard.outputs[name] = collection.capture(name)
        shard.probes.append(collection.probe(f"{name}.probe"))
    return shard


def expected_operators(items: list, epoch: int) -> dict[str, dict]:
    a = oracle.collection_at(_updates(items, "a"), epoch)
    b = oracle.collection_at(_updates(items, "b"), epoch)
    edges = [record for record, c in a.items() if c > 0]
    roots = {key for (key, _), c in b.items() if c > 0}
    return {
        "count": oracle.counts(a),
        "distinct": oracle.distinct(a),
        "join": oracle.join(a, b),
        "min": oracle.min_values(a),
        "reach": {(node, ()): 1 for node in oracle.reachable(edges, roots)},
    }


def run_operators(workers: int, epochs: int, items: list) -> list[dict[str, dict]]:
    """Every output accumulated at every epoch"""
    results = []
    with Cluster(workers) as cluster:
        shards = cluster.dataflow(_build_operators, "operators")
        probes = [p for shard in shards for p in shard.probes]
        for epoch in range(epochs):
            for i, (source, key, val, t, diff) in enumerate(items):
                if t == epoch:
                    shard = shards[i % workers]
                    (shard.a if source == "a" else shard.b).insert(key, val, diff)
            advance_all((h for shard in shards for h in (shard.a, shard.b)), epoch + 1)
            _settle(cluster, probes, epoch + 1)
            results.append(
                {
                    name: accumulate(Capture.gather(shard.outputs[name] for shard in shards), epoch)
                    for name in shards[0].outputs
                }
            )
        for shard in shards:
            shard.a.close()
            shard.b.close()
        cluster.quiesce()
    return results


def _generate_operators(generator: np.random.Generator) -> Case:
    epochs = int(generator.integers(2, 5))
    params = {"workers": int(generator.choice([1, 2])), "epochs": epochs}
    return params, _churn(generator, epochs, ("a", "b"), 40)


def _valid_operators(params: dict[str, Any], items: list) -> bool:
    return all(_nonnegative(_updates(items, source), params["epochs"]) for source in ("a", "b"))


def _check_operators(params: dict[str, Any], items: list) -> None:
    observed = run_operators(params["workers"], params["epochs"], items)
    for epoch, outputs in enumerate(observed):
        for name, expected in expected_operators(items, epoch).items():
            if outputs[name] != expected:
                raise Counterexample(f"{name} at {epoch} is {outputs[name]}, expected {expected}", [name, epoch])


OPERATORS = Suite("operators", _generate_operators, _check_operators, _valid_operators)


# -- determinism -------------------------------------------------------------


def graph_outputs(workers: int, share: bool, edges: list[tuple[int, int]], nodes: int) -> dict[str, dict]:
    session = GraphSession(workers, share, list(ALL_QUERIES), capture=True)
    try:
        session.update_edges([(edge, 1) for edge in edges])
        for query in ALL_QUERIES:
            if query == "four-path":
                args = [((src, dst), 1) for src in range(nodes) for dst in range(nodes) if src != dst]
            else:
                args = [(node, 1) for node in range(nodes)]
            session.update_args(query, args)
        session.advance(1)
        session.settle()
        return dict(session.outputs())
    finally:
        session.close()


def _generate_determinism(generator: np.random.Generator) -> Case:
    epochs = int(generator.integers(2, 4))
    nodes = int(generator.integers(2, 6))
    edges = [
        ("edge", int(generator.integers(nodes)), int(generator.integers(nodes)), 0, 1)
        for _ in range(int(generator.integers(1, 12)))
    ]
    return {"epochs": epochs, "nodes": nodes}, _churn(generator, epochs, ("a", "b"), 30) + edges


def _valid_determinism(params: dict[str, Any], items: list) -> bool:
    return _valid_operators(params, items)


def _check_determinism(params: dict[str, Any], items: list) -> None:
    dataflow_items = [item for item in items if item[0] != "edge"]
    baseline = run_operators(1, params["epochs"], dataflow_items)
    for workers in WORKER_COUNTS[1:]:
        observed = run_operators(workers, params["epochs"], dataflow_items)
        if observed != baseline:
            raise Counterexample(f"{workers} workers disagree with one worker", [workers])

    edges = [(src, dst) for source, src, dst, _, _ in items if source == "edge"]
    reference = graph_outputs(1, True, edges, params["nodes"])
    for workers in WORKER_COUNTS:
        for share in (True, False):
            observed_graph = graph_outputs(workers, share, edges, params["nodes"])
            if observed_graph != reference:
                raise Counterexample(
                    f"graph queries on {workers} workers with sharing {share} disagree", [workers, share]
                )


DETERMINISM = Suite("determinism", _generate_determinism, _check_determinism, _valid_determinism)
