"""The collection API: a stream of (key, val, time, diff) updates in one scope

Methods build operators on the collection's worker and return new
collections or arrangements, so dataflows read as method chains.
"""

from typing import TYPE_CHECKING, Any, Callable, Iterable, Optional

from shared_arrangements.arrangement.arrange import Arranged, arrange
from shared_arrangements.dataflow.channels import Exchange
from shared_arrangements.dataflow.input import Capture, InputHandle, InputOperator, Probe
from shared_arrangements.dataflow.operator import Stream
from shared_arrangements.errors import ScopeError
from shared_arrangements.lattice.time import enter_time, leave_time
from shared_arrangements.operators import stateless
from shared_arrangements.trace.spine import MergeEffort
from shared_arrangements.trace.update import Update

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope

__all__ = ["Collection", "new_input"]

_UNSET: Any = object()

RecordLogic = Callable[[Any, Any], tuple[Any, Any]]
JoinLogic = Callable[[Any, Any, Any], tuple[Any, Any]]


class Collection:
    def __init__(self, scope: "Scope", stream: Stream) -> None:
        self.scope = scope
        self.stream = stream

    def _unary(self, name: str, transform: stateless.Transform, **kwargs: Any) -> "Collection":
        op = stateless.Unary(self.scope, self.stream, name, transform, **kwargs)
        return Collection(self.scope, op.stream())

    # -- stateless ---------------------------------------------------------

    def map(self, logic: RecordLogic, name: str = "map") -> "Collection":
        """Replaces each (key, val) by ``logic(key, val)``"""
        return self._unary(name, stateless.map_updates(logic))

    def flat_map(self, logic: Callable[[Any, Any], Iterable[tuple[Any, Any]]], name: str = "flat_map") -> "Collection":
        return self._unary(name, stateless.flat_map_updates(logic))

    def filter(self, predicate: Callable[[Any, Any], bool], name: str = "filter") -> "Collection":
        return self._unary(name, stateless.filter_updates(predicate))

    def negate(self, name: str = "negate") -> "Collection":
        return self._unary(name, stateless.negate_updates)

    def inspect(self, logic: Callable[[Update], None], name: str = "inspect") -> "Collection":
        return self._unary(name, stateless.inspect_updates(logic))

    def concat(self, *others: "Collection", name: str = "concat") -> "Collection":
        op = stateless.Concat(self.scope, [self.stream, *(c.stream for c in others)], name)
        return Collection(self.scope, op.stream())

    def exchange(self, key: Optional[Callable[[Update], Any]] = None, name: str = "exchange") -> "Collection":
        """Routes each update to the worker owning its key"""
        return self._unary(name, lambda updates: updates, pact=Exchange(key))

    def enter(self, child: "Scope", name: str = "enter") -> "Collection":
        self.scope.require(child.parent, f"{name}: parent of {child.name!r}")
        op = stateless.Unary(child, self.stream, name, stateless.enter_updates, summary=enter_time)
        return Collection(child, op.stream())

    def leave(self, name: str = "leave") -> "Collection":
        parent = self.scope.parent
        if parent is None:
            raise ScopeError(f"{name}: {self.scope.name!r} is not nested in another scope")
        op = stateless.Unary(parent, self.stream, name, stateless.leave_updates, summary=leave_time)
        return Collection(parent, op.stream())

    # -- arranged ------------------------------------------------------------

    def arrange_by_key(self, name: str = "arrange", merge_effort: MergeEffort = _UNSET) -> Arranged:
        if merge_effort is _UNSET:
            return arrange(self, name)
        return arrange(self, name, merge_effort)

    def arrange_by_self(self, name: str = "arrange_by_self", merge_effort: MergeEffort = _UNSET) -> Arranged:
        """Arranges whole (key, val) records as keys with a unit value"""
        return self.map(lambda k, v: ((k, v), ()), f"{name}.key").arrange_by_key(name, merge_effort)

    def join(self, other: "Collection", logic: JoinLogic, name: str = "join") -> "Collection":
        return self.arrange_by_key(f"{name}.left").join(other.arrange_by_key(f"{name}.right"), logic, name=name)

    def join_arranged(self, other: Arranged, logic: JoinLogic, name: str = "join") -> "Collection":
        return self.arrange_by_key(f"{name}.left").join(other, logic, name=name)

    def reduce(self, logic: Callable[[Any, list], list], name: str = "reduce") -> Arranged:
        return self.arrange_by_key(f"{name}.input").reduce(logic, name=name)

    def count(self, name: str = "count") -> "Collection":
        """(key, number of records with that key)"""
        return self.arrange_by_key(f"{name}.input").count(name).as_collection()

    def distinct(self, name: str = "distinct") -> "Collection":
        """Each record present with positive multiplicity, once"""
        arranged = self.arrange_by_self(f"{name}.input").distinct(name)
        return arranged.as_collection(lambda record, _: record)

    def consolidate(self, name: str = "consolidate") -> "Collection":
        """Coalesces updates to the same record and time"""
        return self.arrange_by_key(name).as_collection()

    def iterate(
        self, body: Callable[["Collection"], "Collection"], name: str = "iterate", max_rounds: Optional[int] = None
    ) -> "Collection":
        from shared_arrangements.operators.iterate import iterate

        return iterate(self, body, name, max_rounds)

    # -- sinks ---------------------------------------------------------------

    def probe(self, name: str = "probe") -> Probe:
        return Probe(self.scope, self.stream, name)

    def capture(self, name: str = "capture") -> Capture:
        return Capture(self.scope, self.stream, name)

    def __repr__(self) -> str:
        return f"Collection({self.stream.operator!r})"


def new_input(scope: "Scope", name: str = "input") -> tuple[InputHandle, Collection]:
    op = InputOperator(scope, name)
    return InputHandle(op), Collection(scope, op.stream())
