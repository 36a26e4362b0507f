import pytest
from loguru import logger


@pytest.fixture(autouse=True)
def quiet_logs():
    logger.remove()
    logger.add(lambda message: None, level="WARNING")
    yield
    logger.remove()


@pytest.fixture(params=[1, 2], ids=["one-worker", "two-workers"])
def workers(request) -> int:
    return request.param


@pytest.fixture
def chain_edges() -> list[tuple[int, int]]:
    return [(1, 2), (2, 3), (3, 4), (4, 5)]
