"""Latency samples and their complementary distribution"""

from collections import defaultdict
from typing import Iterable

import numpy as np

__all__ = ["FLOOR_NS", "LatencyRecorder", "ccdf"]

FLOOR_NS = 1_000_000


def ccdf(samples: Iterable[int]) -> list[tuple[int, float]]:
    """(latency, fraction of samples strictly greater) for each distinct latency"""
    values = np.sort(np.fromiter(samples, dtype=np.int64))
    if values.size == 0:
        return []
    distinct = np.unique(values)
    greater = values.size - np.searchsorted(values, distinct, side="right")
    return [(int(v), float(g) / values.size) for v, g in zip(distinct, greater)]


class LatencyRecorder:
    """Per-class latency samples of one worker or one driver, floored at the harness granularity"""

    def __init__(self, floor_ns: int = FLOOR_NS) -> None:
        self.floor_ns = floor_ns
        self.samples: dict[str, list[int]] = defaultdict(list)

    def record(self, query_class: str, latency_ns: int) -> int:
        sample = max(int(latency_ns), self.floor_ns)
        self.samples[query_class].append(sample)
        return sample

    def merge(self, other: "LatencyRecorder") -> "LatencyRecorder":
        """Adds ``other``'s samples to this recorder"""
        for name, values in other.samples.items():
            self.samples[name].extend(values)
        return self

    def ccdf(self, query_class: str) -> list[tuple[int, float]]:
        return ccdf(self.samples.get(query_class, []))

    def percentile(self, query_class: str, q: float) -> int:
        values = self.samples.get(query_class)
        if not values:
            return 0
        return int(np.percentile(np.asarray(values, dtype=np.int64), q, method="higher"))

    def count(self, query_class: str) -> int:
        return len(self.samples.get(query_class, []))

    def classes(self) -> list[str]:
        return sorted(self.samples)
