from typing import Annotated, Literal, Optional, Union

from pydantic import AfterValidator, BaseModel, Field

from shared_arrangements.trace.spine import MergeEffort

QueryClass = Literal["lookup", "one-hop", "two-hop", "four-path"]

ALL_QUERIES: list[QueryClass] = ["lookup", "one-hop", "two-hop", "four-path"]


def _positive_effort(value: Union[int, str]) -> Union[int, str]:
    if isinstance(value, int) and value < 1:
        raise ValueError("merge effort must be at least 1")
    return value


MergeEffortSetting = Annotated[Union[int, Literal["eager", "lazy"]], AfterValidator(_positive_effort)]


def resolve_effort(setting: Union[int, str]) -> MergeEffort:
    """The effort as understood by ``Trace``: None for eager merging, 1 for lazy"""
    if setting == "eager":
        return None
    if setting == "lazy":
        return 1
    return int(setting)


class WorkloadConfig(BaseModel):
    workers: int = Field(1, ge=1, description="Number of workers")
    keys: int = Field(10_000, ge=1, description="Size of the key domain")
    rate: float = Field(1_000.0, ge=0, description="Offered load in updates per second")
    duration: float = Field(1.0, gt=0, description="Length of the measured run in seconds")
    merge_effort: MergeEffortSetting = Field(8, description="Merge effort per inserted update")
    batch_size: int = Field(10_000, ge=1, description="Updates per worker and epoch in throughput mode")
    share: bool = Field(True, description="Whether dataflows share arrangements")
    seed: int = Field(0, ge=0, description="Seed of every generated input stream")

    def effort(self) -> MergeEffort:
        return resolve_effort(self.merge_effort)

    def scaled(self) -> "WorkloadConfig":
        """Keys and rate multiplied by the worker count"""
        return self.model_copy(update={"keys": self.keys * self.workers, "rate": self.rate * self.workers})


class GraphConfig(WorkloadConfig):
    nodes: int = Field(100_000, ge=1, description="Nodes of the synthetic graph")
    edges: int = Field(640_000, ge=0, description="Edges of the synthetic graph")
    edge_file: Optional[str] = Field(None, description="Edge file replacing the synthetic graph")
    queries: list[QueryClass] = Field(default_factory=lambda: list(ALL_QUERIES), description="Installed query classes")
    query_rate: float = Field(1_000.0, ge=0, description="Query argument updates per second")
    concurrent: int = Field(10, ge=1, description="Live arguments per query class")
