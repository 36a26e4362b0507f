"""Edge files: one directed edge per line as two whitespace-separated node ids

Blank lines and lines starting with ``#`` are skipped.
"""

from typing import Iterable, Iterator

from loguru import logger

from shared_arrangements.errors import EdgeFileError

__all__ = ["load_edges", "parse_edges", "source_node"]


def parse_edges(lines: Iterable[str], path: str = "<edges>") -> Iterator[tuple[int, int]]:
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        fields = text.split()
        if len(fields) != 2:
            raise EdgeFileError(path, number, text)
        try:
            yield int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeFileError(path, number, text) from None


def load_edges(path: str) -> list[tuple[int, int]]:
    with open(path, "r") as f:
        edges = list(parse_edges(f, path))
    logger.info(f"Loaded {len(edges)} edges from {path}")
    return edges


def source_node(edges: list[tuple[int, int]]) -> int | None:
    """The first node with an outgoing edge"""
    return edges[0][0] if edges else None
