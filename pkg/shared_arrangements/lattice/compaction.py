"""Compaction of historical times

``rep`` maps a time to the least time that compares identically against every
time beyond a frontier. Updates whose times share a representative can be
coalesced without any reader beyond the frontier noticing.
"""

from functools import reduce
from itertools import product
from typing import Iterator

from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Product, Time, glb, less_equal, lub

__all__ = ["rep", "indistinguishable", "grid", "grid_bound"]


def rep(frontier: Antichain, t: Time) -> Time:
    """glb over f in frontier of lub(t, f); the identity for an empty frontier"""
    if not frontier:
        return t
    return reduce(glb, (lub(t, f) for f in frontier))


def grid(bound: Time) -> Iterator[Time]:
    """Every time at or below ``bound``"""
    if isinstance(bound, tuple):
        for a, b in product(range(bound[0] + 1), range(bound[1] + 1)):
            yield Product(a, b)
    else:
        yield from range(bound + 1)


def grid_bound(*times: Time, margin: int = 2) -> Time:
    """A bound strictly dominating every coordinate of ``times``, plus a margin"""
    if isinstance(times[0], tuple):
        return Product(
            max(t[0] for t in times) + margin,  # type: ignore[index]
            max(t[1] for t in times) + margin,  # type: ignore[index]
        )
    return max(times) + margin  # type: ignore[type-var, operator]


def indistinguishable(frontier: Antichain, t1: Time, t2: Time, bound: Time) -> bool:
    """True when t1 and t2 compare equally to every grid time beyond ``frontier``

    The universal quantifier is truncated to the grid below ``bound``, which
    must dominate t1, t2 and every element of the frontier.
    """
    for f in grid(bound):
        if frontier.less_equal(f) and less_equal(t1, f) != less_equal(t2, f):
            return False
    return True
