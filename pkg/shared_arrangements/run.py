#!/usr/bin/env python
"""Command-line entry point for the benchmarks, graph workloads and verification suites

Exit codes: 0 on success, 1 when a verification suite finds a counterexample,
2 on a usage error.
"""

import json
import sys
from typing import Annotated, Any, Literal, Optional

from loguru import logger
from pydantic import AfterValidator, BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, CliApp, CliSubCommand, SettingsConfigDict, get_subcommand

from shared_arrangements.config import config, configure_logging
from shared_arrangements.errors import EdgeFileError
from shared_arrangements.models import ALL_QUERIES, GraphConfig, QueryClass, WorkloadConfig

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _edge_pair(value: str) -> str:
    parts = value.split(",")
    if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
        raise ValueError(f"expected N,M but got {value!r}")
    return value


EdgePair = Annotated[str, AfterValidator(_edge_pair)]


def _synthetic(value: str) -> tuple[int, int]:
    nodes, edges = (int(p) for p in value.split(","))
    return nodes, edges


class _Command(BaseModel):
    verbose: bool = Field(False, description="Log at DEBUG level")

    def setup_logging(self) -> None:
        configure_logging("DEBUG" if self.verbose else config.logging.log_level)

    def execute(self) -> int:
        raise NotImplementedError


class BenchArrange(WorkloadConfig, _Command):
    """Arrange a churning collection of keys and maintain a count over it"""

    mode: Literal["latency", "throughput"] = Field("latency", description="Open-loop latency or closed-loop throughput")
    scale_with_workers: bool = Field(False, description="Multiply keys and rate by the worker count")
    out: str = Field("results/bench-arrange", description="Prefix of the result files")

    def execute(self) -> int:
        from shared_arrangements.harness.bench_arrange import bench_arrange
        from shared_arrangements.harness.results import ResultLog

        workload = self.scaled() if self.scale_with_workers else self
        results = ResultLog(self.out, "bench-arrange")
        run = bench_arrange(workload, self.mode, results)
        results.close(
            {
                "workers": workload.workers,
                "keys": workload.keys,
                "rate": workload.rate,
                "merge_effort": workload.merge_effort,
                "updates_sent": run.updates_sent,
                "saturated": run.saturated,
            }
        )
        return EXIT_OK


class BenchJoin(_Command):
    """Join batches of growing size against a pre-existing arrangement"""

    arranged: int = Field(1_000_000, ge=0, description="Records in the pre-existing arrangement")
    batches: list[int] = Field([100, 1_000, 10_000, 100_000], description="Batch sizes to join")
    workers: int = Field(1, ge=1, description="Number of workers")
    seed: int = Field(0, ge=0, description="Seed of the sampled keys")
    out: str = Field("results/bench-join", description="Prefix of the result files")

    def execute(self) -> int:
        from shared_arrangements.harness.bench_join import bench_join
        from shared_arrangements.harness.results import ResultLog

        results = ResultLog(self.out, "bench-join")
        measurements = bench_join(self.arranged, self.batches, self.workers, self.seed, results)
        results.close({"arranged": self.arranged, "batches": [m.batch_size for m in measurements]})
        return EXIT_OK


class Graph(_Command):
    """Interactive queries against an evolving graph"""

    edges: Optional[str] = Field(None, description="Edge file, one 'src dst' pair per line")
    random: Optional[EdgePair] = Field(None, description="Synthetic graph as NODES,EDGES")
    queries: list[QueryClass] = Field(default_factory=lambda: list(ALL_QUERIES), description="Query classes")
    update_rate: float = Field(1_000.0, ge=0, description="Edge updates per second")
    query_rate: float = Field(1_000.0, ge=0, description="Query argument updates per second")
    share: bool = Field(True, description="Share the edge arrangements between queries")
    concurrent: int = Field(10, ge=1, description="Live arguments per query class")
    workers: int = Field(1, ge=1, description="Number of workers")
    duration: float = Field(1.0, gt=0, description="Length of the measured run in seconds")
    seed: int = Field(0, ge=0, description="Seed of every generated input stream")
    out: str = Field("results/graph", description="Prefix of the result files")

    def workload(self) -> GraphConfig:
        fields: dict[str, Any] = {
            "workers": self.workers,
            "rate": self.update_rate,
            "duration": self.duration,
            "share": self.share,
            "seed": self.seed,
            "edge_file": self.edges,
            "queries": self.queries,
            "query_rate": self.query_rate,
            "concurrent": self.concurrent,
        }
        if self.random is not None:
            fields["nodes"], fields["edges"] = _synthetic(self.random)
        return GraphConfig(**fields)

    def execute(self) -> int:
        from shared_arrangements.harness.graph import graph
        from shared_arrangements.harness.results import ResultLog

        workload = self.workload()
        results = ResultLog(self.out, "graph")
        run = graph(workload, results)
        results.close(
            {
                "share": workload.share,
                "queries": list(workload.queries),
                "resident_graph_updates": run.resident_graph_updates,
                "graph_arrangements": run.graph_traces,
                "saturated": run.saturated,
            }
        )
        return EXIT_OK


class GraphBatch(_Command):
    """Reachability, shortest paths or connected components over a static graph"""

    task: Literal["reach", "sssp", "wcc"] = Field("reach", description="Computation to run")
    edges: Optional[str] = Field(None, description="Edge file, one 'src dst' pair per line")
    random: Optional[EdgePair] = Field(None, description="Synthetic graph as NODES,EDGES")
    root: Optional[int] = Field(None, description="Root of reach and sssp, the first source node by default")
    workers: int = Field(1, ge=1, description="Number of workers")
    seed: int = Field(0, ge=0, description="Seed of the synthetic graph")

    def execute(self) -> int:
        from shared_arrangements.harness.edges import load_edges
        from shared_arrangements.harness.generators import random_edges
        from shared_arrangements.harness.graph_batch import graph_batch

        if self.edges is not None:
            edges = load_edges(self.edges)
        elif self.random is not None:
            edges = random_edges(self.seed, *_synthetic(self.random))
        else:
            raise ValueError("graph-batch needs --edges FILE or --random N,M")
        result = graph_batch(self.task, edges, self.workers, self.root)
        print(json.dumps({"task": result.task, "elapsed_ms": result.elapsed_ns / 1e6, **result.summary}))
        return EXIT_OK


class DatalogTc(_Command):
    """Nodes reachable from each source by one or more edges"""

    edges: str = Field(..., description="Edge file, one 'src dst' pair per line")
    sources: list[int] = Field(..., description="Source nodes")
    workers: int = Field(1, ge=1, description="Number of workers")

    def execute(self) -> int:
        from shared_arrangements.harness.edges import load_edges
        from shared_arrangements.harness.graph_batch import datalog_tc

        result = datalog_tc(load_edges(self.edges), self.sources, self.workers)
        for source, size in result.summary["reachable"].items():
            print(f"{source}\t{size}")
        print(f"elapsed_ms\t{result.elapsed_ns / 1e6:.3f}")
        return EXIT_OK


class Verify(_Command):
    """Randomized property suites checked against brute force"""

    suite: str = Field("all", description="lattice, trace, sharing, operators, determinism or all")
    seed: int = Field(0, ge=0, description="Seed of the generated cases")
    iters: int = Field(100, ge=1, description="Cases per suite")
    inject_fault: Optional[Literal["skip-consolidation"]] = Field(None, description="Break the engine on purpose")

    def execute(self) -> int:
        from shared_arrangements.harness.verify import verify

        reports = verify(self.suite, self.seed, self.iters, self.inject_fault)
        for report in reports:
            print(report.model_dump_json())
            if report.failure is not None:
                failure = report.failure
                logger.error(
                    f"{failure.suite} failed on case {failure.case} with seed {failure.seed}: {failure.message}"
                )
                logger.error(f"witness {failure.witness}, minimal case {failure.minimal_case}")
                return EXIT_FAILED
        return EXIT_OK


class Cli(BaseSettings):
    """Shared arrangements: benchmarks, graph workloads and verification"""

    bench_arrange: CliSubCommand[BenchArrange]
    bench_join: CliSubCommand[BenchJoin]
    graph: CliSubCommand[Graph]
    graph_batch: CliSubCommand[GraphBatch]
    datalog_tc: CliSubCommand[DatalogTc]
    verify: CliSubCommand[Verify]

    model_config = SettingsConfigDict(
        cli_prog_name="shared-arrangements",
        cli_kebab_case=True,
        cli_implicit_flags=True,
        env_prefix="SHARED_ARRANGEMENTS__CLI__",
        extra="ignore",
    )


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cli = CliApp.run(Cli, cli_args=argv if argv is not None else sys.argv[1:])
    except ValidationError as e:
        for error in e.errors():
            logger.error(f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}")
        return EXIT_USAGE
    except SystemExit as e:
        # argparse exits on --help and on malformed arguments
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    command = get_subcommand(cli, is_required=False)
    if not isinstance(command, _Command):
        logger.error("a command is required, see --help")
        return EXIT_USAGE
    command.setup_logging()

    try:
        return command.execute()
    except ValidationError as e:
        for error in e.errors():
            logger.error(f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}")
        return EXIT_USAGE
    except (EdgeFileError, FileNotFoundError, ValueError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
