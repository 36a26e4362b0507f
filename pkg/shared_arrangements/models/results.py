from typing import ClassVar

from pydantic import BaseModel, Field


class ResultRow(BaseModel):
    schema_name: ClassVar[str] = "row"

    @classmethod
    def header(cls) -> list[str]:
        return list(cls.model_fields)

    def values(self) -> list[object]:
        return [getattr(self, name) for name in type(self).model_fields]


class LatencyRow(ResultRow):
    schema_name: ClassVar[str] = "latency"

    query_class: str = Field(..., description="Measured round or query class")
    latency_ns: int = Field(..., ge=0, description="Completion latency in nanoseconds")


class CcdfRow(ResultRow):
    schema_name: ClassVar[str] = "ccdf"

    query_class: str = Field(..., description="Measured round or query class")
    latency_ns: int = Field(..., ge=0, description="Distinct sampled latency in nanoseconds")
    fraction_greater: float = Field(..., ge=0, le=1, description="Fraction of the class's samples above the latency")


class MemoryRow(ResultRow):
    schema_name: ClassVar[str] = "memory"

    trace_name: str = Field(..., description="Trace shard name")
    resident_updates: int = Field(..., ge=0, description="Updates stored in the shard")
    resident_batches: int = Field(..., ge=0, description="Batches stored in the shard")


class WorkRow(ResultRow):
    schema_name: ClassVar[str] = "work"

    counter: str = Field(..., description="Counter name")
    value: float = Field(..., description="Counter value")


class VerifyFailure(BaseModel):
    suite: str = Field(..., description="Suite that found the counterexample")
    seed: int = Field(..., description="Seed of the failing case")
    case: int = Field(..., description="Index of the failing case within the run")
    message: str = Field(..., description="What was violated")
    witness: list = Field(default_factory=list, description="Offending values, such as a (key, time) pair")
    minimal_case: list = Field(default_factory=list, description="Smallest input found that still fails")


class VerifyReport(BaseModel):
    suite: str = Field(..., description="Suite name")
    seed: int = Field(..., description="Seed of the run")
    cases: int = Field(0, description="Cases checked")
    failure: VerifyFailure | None = Field(None, description="First counterexample, shrunk")

    @property
    def passed(self) -> bool:
        return self.failure is None
