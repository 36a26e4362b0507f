import json
from typing import Any

import httpx
from loguru import logger


def load_config(url: str, timeout: float = 10.0) -> dict[str, Any]:
    try:
        resp = httpx.get(str(url), timeout=timeout)
        resp.raise_for_status()
        return resp.json()

    except httpx.ConnectError:
        logger.error(f"could not connect to {httpx.URL(url).host}")

    except httpx.HTTPStatusError as e:
        logger.error(f"config request to {httpx.URL(url)} returned {e.response.status_code}")

    except json.JSONDecodeError:
        logger.error(f"failed to parse json from {httpx.URL(url)}")

    return {}
