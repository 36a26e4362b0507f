from typing import Optional

from pydantic import Field, Json
from pydantic_settings import BaseSettings, SettingsConfigDict

__all__ = ["initial_settings"]


class InitialSettings(BaseSettings):
    """Where the runtime configuration is loaded from"""

    file: Optional[str] = Field("config.json")
    http_url: Optional[str] = Field(None)
    json: Optional[Json] = Field(None)  # raw config passed as an env var

    load_config: bool = Field(True, include_in_schema=False)  # disables loading, defaults apply

    model_config = SettingsConfigDict(
        env_prefix="SHARED_ARRANGEMENTS__CONFIG__",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="ignore",
    )


initial_settings = InitialSettings()
