"""Randomized checks of the engine against brute-force answers"""

from shared_arrangements.harness.verify.dataflows import DETERMINISM, OPERATORS, SHARING
from shared_arrangements.harness.verify.lattice import LATTICE
from shared_arrangements.harness.verify.runner import FAULTS, Counterexample, Suite, inject, run_suite, shrink
from shared_arrangements.harness.verify.trace import TRACE
from shared_arrangements.models import VerifyReport

SUITES: dict[str, Suite] = {suite.name: suite for suite in (LATTICE, TRACE, SHARING, OPERATORS, DETERMINISM)}


def verify(name: str, seed: int, iterations: int, fault: str | None = None) -> list[VerifyReport]:
    """Runs the named suite, or every suite for ``all``; the first failing report wins"""
    if name != "all" and name not in SUITES:
        raise ValueError(f"unknown suite {name!r}, expected one of {['all', *SUITES]}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}, expected one of {list(FAULTS)}")
    reports: list[VerifyReport] = []
    for suite in SUITES.values() if name == "all" else [SUITES[name]]:
        report = run_suite(suite, seed, iterations, fault)
        reports.append(report)
        if not report.passed:
            break
    return reports


__all__ = ["FAULTS", "SUITES", "Counterexample", "Suite", "inject", "run_suite", "shrink", "verify"]
