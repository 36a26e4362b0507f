import os
from string import Template
from typing import Any, Mapping, Optional

from loguru import logger

__all__ = ["substitute_env_vars"]


def _substitute_string(value: str, env: Mapping[str, str]) -> str:
    template = Template(value)
    missing = [name for name in template.get_identifiers() if name not in env]
    if missing:
        logger.warning(f"config value {value!r} references unset variables {missing}")
    return template.safe_substitute(env)


def substitute_env_vars(config: Any, env: Optional[Mapping[str, str]] = None) -> Any:
    """Replaces ``$VAR`` references in every string of a config tree

    ``None`` entries are dropped from mappings so the settings defaults apply.
    """
    if env is None:
        env = os.environ.copy()

    if isinstance(config, str):
        return _substitute_string(config, env)

    if isinstance(config, dict):
        return {k: substitute_env_vars(v, env) for k, v in config.items() if v is not None}

    if isinstance(config, list):
        return [substitute_env_vars(v, env) for v in config]

    return config
