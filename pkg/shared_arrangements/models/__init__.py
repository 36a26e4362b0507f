from .results import CcdfRow, LatencyRow, MemoryRow, ResultRow, VerifyFailure, VerifyReport, WorkRow
from .workload import ALL_QUERIES, GraphConfig, QueryClass, WorkloadConfig

__all__ = [
    "ALL_QUERIES",
    "CcdfRow",
    "GraphConfig",
    "LatencyRow",
    "MemoryRow",
    "QueryClass",
    "ResultRow",
    "VerifyFailure",
    "VerifyReport",
    "WorkRow",
    "WorkloadConfig",
]
