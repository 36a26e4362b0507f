from typing import Literal

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from shared_arrangements.models.workload import MergeEffortSetting, resolve_effort


class Runtime(BaseModel):
    workers: int = Field(1, ge=1, description="number of worker shards")
    channel_capacity: int = Field(1024, ge=1, description="records per exchanged message")
    threaded: bool = Field(False, description="run each worker on its own thread")


class TraceSettings(BaseModel):
    merge_effort: MergeEffortSetting = Field(
        8, description='merge work per inserted update, "eager" to merge immediately'
    )

    def effort(self) -> int | None:
        return resolve_effort(self.merge_effort)


class Operators(BaseModel):
    join_fuel: int = Field(1 << 16, ge=1, description="join outputs produced per activation")
    iterate_max_rounds: int = Field(1_000_000, ge=1, description="rounds before an iteration fails")


class Logging(BaseModel):
    log_level: Literal["INFO", "DEBUG", "WARNING"] = Field("INFO", description="default log level")


class Settings(BaseSettings):
    runtime: Runtime = Field(
        default_factory=lambda: Runtime.model_construct(),
        description="worker and channel configuration",
    )

    trace: TraceSettings = Field(
        default_factory=lambda: TraceSettings.model_construct(),
        description="trace maintenance configuration",
    )

    operators: Operators = Field(
        default_factory=lambda: Operators.model_construct(),
        description="operator configuration",
    )

    logging: Logging = Field(
        default_factory=lambda: Logging.model_construct(),
        description="logging config",
    )

    model_config = SettingsConfigDict(
        env_prefix="SHARED_ARRANGEMENTS__",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="ignore",
    )
