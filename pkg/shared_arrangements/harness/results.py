"""Append-only CSV output of harness runs

One file per row schema, named ``<prefix>.<schema>.csv``. Each file is created
with its header on first use and every row is flushed as it is written, so an
interrupted run leaves complete rows behind.
"""

import csv
import json
import os
from datetime import datetime
from typing import IO, Any, Optional

from loguru import logger

from shared_arrangements.harness.latency import LatencyRecorder
from shared_arrangements.models import CcdfRow, LatencyRow, MemoryRow, ResultRow, WorkRow
from shared_arrangements.trace.cursor import WorkCounters

__all__ = ["ResultLog"]


class ResultLog:
    def __init__(self, prefix: str, command: str = "run") -> None:
        self.prefix = prefix
        self.command = command
        self.start_time = datetime.now()
        self.row_counts: dict[str, int] = {}
        self._files: dict[str, IO[str]] = {}
        self._writers: dict[str, Any] = {}
        self.latency_summary: dict[str, dict[str, int]] = {}

    def path(self, schema: str) -> str:
        return f"{self.prefix}.{schema}.csv"

    def _writer(self, row_type: type[ResultRow]) -> Any:
        schema = row_type.schema_name
        if schema not in self._writers:
            path = self.path(schema)
            directory = os.path.dirname(path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            handle = open(path, "w", newline="")
            writer = csv.writer(handle)
            writer.writerow(row_type.header())
            handle.flush()
            self._files[schema] = handle
            self._writers[schema] = writer
            self.row_counts[schema] = 0
            logger.info(f"Writing {schema} rows to {path}")
        return self._writers[schema]

    def append(self, row: ResultRow) -> None:
        schema = row.schema_name
        self._writer(type(row)).writerow(row.values())
        self._files[schema].flush()
        self.row_counts[schema] += 1

    def latency(self, query_class: str, latency_ns: int) -> None:
        self.append(LatencyRow(query_class=query_class, latency_ns=latency_ns))

    def latencies(self, recorder: LatencyRecorder) -> None:
        """Every sample of every class, then each class's CCDF and percentiles"""
        for name in recorder.classes():
            for sample in recorder.samples[name]:
                self.latency(name, sample)
        for name in recorder.classes():
            for latency_ns, fraction in recorder.ccdf(name):
                self.append(CcdfRow(query_class=name, latency_ns=latency_ns, fraction_greater=fraction))
            self.latency_summary[name] = {
                "samples": recorder.count(name),
                "p50_ns": recorder.percentile(name, 50),
                "p99_ns": recorder.percentile(name, 99),
                "max_ns": recorder.percentile(name, 100),
            }

    def memory(self, trace_name: str, resident_updates: int, resident_batches: int) -> None:
        self.append(
            MemoryRow(trace_name=trace_name, resident_updates=resident_updates, resident_batches=resident_batches)
        )

    def work(self, counter: str, value: float) -> None:
        self.append(WorkRow(counter=counter, value=value))

    def counters(self, counters: WorkCounters, suffix: str = "") -> None:
        for name, value in vars(counters).items():
            self.work(f"{name}{suffix}", value)

    def get_summary(self) -> dict[str, object]:
        end_time = datetime.now()
        return {
            "command": self.command,
            "start_time": self.start_time.isoformat(),
            "end_time": end_time.isoformat(),
            "duration_seconds": (end_time - self.start_time).total_seconds(),
            "rows": dict(self.row_counts),
            "files": {schema: self.path(schema) for schema in self.row_counts},
            "latency": dict(self.latency_summary),
        }

    def close(self, extra: Optional[dict[str, object]] = None) -> None:
        """Closes every file and writes ``<prefix>.summary.json``"""
        for handle in self._files.values():
            handle.close()
        self._files.clear()
        self._writers.clear()
        summary = self.get_summary()
        if extra:
            summary.update(extra)
        try:
            directory = os.path.dirname(self.prefix)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(f"{self.prefix}.summary.json", "w") as f:
                f.write(json.dumps(summary, indent=2) + "\n")
            logger.info(f"Finalized results: {self.prefix}.summary.json")
        except OSError as e:
            logger.error(f"Error writing run summary: {e}")

    def __enter__(self) -> "ResultLog":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()
