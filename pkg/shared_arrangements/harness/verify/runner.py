"""Randomized property suites with shrinking

A suite generates a case as ``(params, items)`` from a seeded generator and
checks it, raising ``Counterexample`` on a violation. A failing case is shrunk
by deleting items while it still fails.
"""

from contextlib import contextmanager
from dataclasses import dataclass
from operator import itemgetter
from typing import Any, Callable, Iterable, Iterator, Optional
from unittest import mock

import numpy as np
from loguru import logger

from shared_arrangements.harness.generators import rng
from shared_arrangements.models import VerifyFailure, VerifyReport
from shared_arrangements.trace.update import Update

__all__ = ["FAULTS", "Counterexample", "Suite", "inject", "run_suite", "shrink"]

Case = tuple[dict[str, Any], list]

SHRINK_ATTEMPTS = 200


class Counterexample(Exception):
    def __init__(self, message: str, witness: Optional[list] = None) -> None:
        super().__init__(message)
        self.message = message
        self.witness = witness or []


@dataclass
class Suite:
    name: str
    generate: Callable[[np.random.Generator], Case]
    check: Callable[[dict[str, Any], list], None]
    valid: Callable[[dict[str, Any], list], bool] = lambda params, items: True


def _unconsolidated(updates: Iterable[Update], since: Any) -> list[Update]:
    return sorted(updates, key=itemgetter(0, 1, 2))


FAULTS: dict[str, str] = {
    "skip-consolidation": "shared_arrangements.trace.batch.consolidate",
}

_REPLACEMENTS: dict[str, Callable] = {
    "skip-consolidation": _unconsolidated,
}


@contextmanager
def inject(fault: Optional[str]) -> Iterator[None]:
    if fault is None:
        yield
        return
    logger.warning(f"Injecting fault {fault!r}")
    with mock.patch(FAULTS[fault], _REPLACEMENTS[fault]):
        yield


def _fails(suite: Suite, params: dict[str, Any], items: list) -> Optional[Counterexample]:
    if not suite.valid(params, items):
        return None
    try:
        suite.check(params, items)
    except Counterexample as failure:
        return failure
    return None


def shrink(suite: Suite, params: dict[str, Any], items: list, failure: Counterexample) -> tuple[list, Counterexample]:
    """Deletes chunks of items, halving the chunk size, while the case keeps failing"""
    attempts = 0
    chunk = max(len(items) // 2, 1)
    while chunk >= 1 and attempts < SHRINK_ATTEMPTS:
        start = 0
        shrunk = False
        while start < len(items) and attempts < SHRINK_ATTEMPTS:
            candidate = items[:start] + items[start + chunk :]
            attempts += 1
            smaller = _fails(suite, params, candidate)
            if smaller is not None:
                items, failure, shrunk = candidate, smaller, True
            else:
                start += chunk
        if not shrunk:
            chunk //= 2
    logger.debug(f"{suite.name}: shrunk to {len(items)} items in {attempts} attempts")
    return items, failure


def run_suite(suite: Suite, seed: int, iterations: int, fault: Optional[str] = None) -> VerifyReport:
    report = VerifyReport(suite=suite.name, seed=seed)
    with inject(fault):
        for index in range(iterations):
            params, items = suite.generate(rng(seed, f"{suite.name}.{index}"))
            if not suite.valid(params, items):
                continue
            report.cases += 1
            try:
                suite.check(params, items)
            except Counterexample as failure:
                logger.info(f"{suite.name}: case {index} failed: {failure.message}")
                minimal, failure = shrink(suite, params, items, failure)
                report.failure = VerifyFailure(
                    suite=suite.name,
                    seed=seed,
                    case=index,
                    message=failure.message,
                    witness=failure.witness,
                    minimal_case=[params, *minimal],
                )
                return report
    logger.info(f"{suite.name}: {report.cases} cases passed")
    return report
