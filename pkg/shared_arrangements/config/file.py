import json
from typing import Any

from loguru import logger


def load_config(file: str) -> dict[str, Any]:
    try:
        with open(file, "r") as f:
            return json.load(f)

    except FileNotFoundError:
        logger.warning(f'the "{file}" config file was not found, using defaults')

    except json.JSONDecodeError as e:
        logger.error(f'"{file}" is not valid json: {e.msg} at line {e.lineno}')

    except OSError:
        logger.error(f'there was an error reading the "{file}" file')

    return {}
