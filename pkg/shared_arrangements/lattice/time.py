"""Partially ordered timestamps

Two shapes of time exist. A scalar time is a plain non-negative ``int`` epoch.
A product time is a ``Product(outer, inner)`` pair used inside iteration
scopes, ordered coordinate-wise. Python's own tuple ordering on ``Product``
is lexicographic, which is the canonical total order used to sort times
inside batches.
"""

from typing import NamedTuple, Union

from shared_arrangements.errors import TimeShapeError

__all__ = [
    "Product",
    "Time",
    "TimeShape",
    "less_equal",
    "less_than",
    "lub",
    "glb",
    "minimum",
    "shape_of",
    "enter_time",
    "leave_time",
    "advance_round",
]

U64_MAX = (1 << 64) - 1


class Product(NamedTuple):
    outer: int
    inner: int


Time = Union[int, Product]

TimeShape = type[int] | type[Product]


def shape_of(t: Time) -> TimeShape:
    return Product if isinstance(t, tuple) else int


def minimum(shape: TimeShape) -> Time:
    """The least element of a lattice shape"""
    return Product(0, 0) if shape is Product else 0


def _check(a: Time, b: Time) -> bool:
    """Returns True for product times, raises on a shape mismatch"""
    a_product = isinstance(a, tuple)
    if a_product != isinstance(b, tuple):
        raise TimeShapeError(f"cannot compare {a!r} with {b!r}")
    return a_product


def less_equal(a: Time, b: Time) -> bool:
    if _check(a, b):
        return a[0] <= b[0] and a[1] <= b[1]  # type: ignore[index]
    return a <= b  # type: ignore[operator]


def less_than(a: Time, b: Time) -> bool:
    return a != b and less_equal(a, b)


def lub(a: Time, b: Time) -> Time:
    """Least upper bound: coordinate-wise maximum"""
    if _check(a, b):
        return Product(max(a[0], b[0]), max(a[1], b[1]))  # type: ignore[index]
    return a if a >= b else b  # type: ignore[operator]


def glb(a: Time, b: Time) -> Time:
    """Greatest lower bound: coordinate-wise minimum"""
    if _check(a, b):
        return Product(min(a[0], b[0]), min(a[1], b[1]))  # type: ignore[index]
    return a if a <= b else b  # type: ignore[operator]


def enter_time(t: int) -> Product:
    return Product(t, 0)


def leave_time(t: Product) -> int:
    return t.outer


def advance_round(t: Product, rounds: int = 1) -> Product:
    return Product(t.outer, t.inner + rounds)
