"""Lattice laws and the correctness and optimality of compaction representatives"""

from typing import Any

import numpy as np

from shared_arrangements.harness.verify.runner import Case, Counterexample, Suite
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.compaction import grid, grid_bound, indistinguishable, rep
from shared_arrangements.lattice.time import Product, Time, glb, less_equal, lub

__all__ = ["LATTICE"]


def _time(generator: np.random.Generator, shape: str) -> Time:
    if shape == "product":
        return Product(int(generator.integers(0, 5)), int(generator.integers(0, 5)))
    return int(generator.integers(0, 8))


def generate(generator: np.random.Generator) -> Case:
    items = []
    for shape in ("int", "product"):
        frontier = [_time(generator, shape) for _ in range(int(generator.integers(1, 4)))]
        items.append((shape, frontier, _time(generator, shape), _time(generator, shape)))
    return {}, items


def _laws(a: Time, b: Time) -> None:
    joined, met = lub(a, b), glb(a, b)
    if joined != lub(b, a) or met != glb(b, a):
        raise Counterexample(f"lub or glb of {a} and {b} is not commutative", [a, b])
    if not (less_equal(a, joined) and less_equal(b, joined) and less_equal(met, a) and less_equal(met, b)):
        raise Counterexample(f"lub {joined} or glb {met} of {a} and {b} is not a bound", [a, b])
    if lub(a, met) != a or glb(a, joined) != a:
        raise Counterexample(f"absorption fails for {a} and {b}", [a, b])


def check(params: dict[str, Any], items: list) -> None:
    for _, frontier_times, t1, t2 in items:
        _laws(t1, t2)
        frontier = Antichain(frontier_times)
        bound = grid_bound(t1, t2, *frontier)
        r1 = rep(frontier, t1)
        if not less_equal(t1, r1):
            raise Counterexample(f"rep({frontier}, {t1}) = {r1} precedes the time it represents", [t1, r1])
        for beyond in grid(bound):
            if frontier.less_equal(beyond) and less_equal(t1, beyond) != less_equal(r1, beyond):
                raise Counterexample(
                    f"{t1} and its representative {r1} under {frontier} compare differently to {beyond}",
                    [t1, r1, beyond],
                )
        if indistinguishable(frontier, t1, t2, bound) and r1 != rep(frontier, t2):
            raise Counterexample(
                f"{t1} and {t2} are indistinguishable beyond {frontier} but map to {r1} and {rep(frontier, t2)}",
                [t1, t2],
            )


LATTICE = Suite("lattice", generate, check)
