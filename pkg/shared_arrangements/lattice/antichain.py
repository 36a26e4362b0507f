from typing import Iterable, Iterator

from shared_arrangements.lattice.time import Time, TimeShape, less_equal, minimum

__all__ = ["Antichain", "beyond", "frontier_insert", "meet"]


class Antichain:
    """An immutable set of pairwise incomparable times

    The empty antichain means no further times can occur (a closed frontier).
    Elements are kept sorted in the canonical order, so two antichains holding
    the same set compare and hash equal regardless of insertion order.
    """

    __slots__ = ("elements",)

    elements: tuple[Time, ...]

    def __init__(self, times: Iterable[Time] = ()) -> None:
        minimal: list[Time] = []
        for t in times:
            if any(less_equal(m, t) for m in minimal):
                continue
            minimal = [m for m in minimal if not less_equal(t, m)]
            minimal.append(t)
        self.elements = tuple(sorted(minimal))

    @classmethod
    def minimum(cls, shape: TimeShape) -> "Antichain":
        return cls((minimum(shape),))

    @classmethod
    def empty(cls) -> "Antichain":
        return cls(())

    def less_equal(self, t: Time) -> bool:
        """True when ``t`` is beyond this frontier"""
        return any(less_equal(f, t) for f in self.elements)

    def less_than(self, t: Time) -> bool:
        return any(less_equal(f, t) and f != t for f in self.elements)

    def insert(self, t: Time) -> "Antichain":
        if self.less_equal(t):
            return self
        return Antichain((*self.elements, t))

    def dominates(self, other: "Antichain") -> bool:
        """True when every time beyond ``self`` is also beyond ``other``

        Equivalently ``other`` is pointwise at or before ``self``; the empty
        antichain dominates everything.
        """
        return all(other.less_equal(t) for t in self.elements)

    def is_empty(self) -> bool:
        return not self.elements

    def map(self, f) -> "Antichain":
        return Antichain(f(t) for t in self.elements)

    def __iter__(self) -> Iterator[Time]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __bool__(self) -> bool:
        return bool(self.elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Antichain):
            return NotImplemented
        return self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(tuple(t)) if isinstance(t, tuple) else repr(t) for t in self.elements) + "}"


def beyond(t: Time, frontier: Antichain) -> bool:
    return frontier.less_equal(t)


def frontier_insert(frontier: Antichain, t: Time) -> Antichain:
    return frontier.insert(t)


def meet(frontiers: Iterable[Antichain]) -> Antichain:
    """Greatest lower bound of frontiers: the minimal elements of their union"""
    return Antichain(t for f in frontiers for t in f)
