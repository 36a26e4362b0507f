"""Group-wise reduction maintained in its own shared arrangement

For each key the operator tracks the times at which its output may change:
the times of newly arrived input, closed under least upper bound with each
other and with the times already in the key's input and output history. Once
the input is complete through such a time, the input is accumulated there,
the user logic applied, and the difference from the accumulated output is
emitted as a correction.
"""

from collections import Counter
from typing import TYPE_CHECKING, Any, Callable, Hashable, Iterable

from shared_arrangements.arrangement.arrange import Arranged, hold_capabilities
from shared_arrangements.arrangement.handle import TraceHandle
from shared_arrangements.dataflow.operator import Operator
from shared_arrangements.errors import NondeterministicLogicError
from shared_arrangements.lattice.antichain import Antichain, meet
from shared_arrangements.lattice.time import Time, less_equal, lub
from shared_arrangements.trace.batch import BatchBuilder
from shared_arrangements.trace.spine import MergeEffort, Trace
from shared_arrangements.trace.update import Update, checked_add

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope

__all__ = ["Reduce", "count", "distinct", "lub_closure", "reduce_arranged"]

ReduceLogic = Callable[[Any, list[tuple[Any, int]]], list[tuple[Any, int]]]

_UNSET: Any = object()


def lub_closure(times: Iterable[Time], history: Iterable[Time]) -> set[Time]:
    """``times`` closed under lub with each other and with ``history``"""
    closure = set(times)
    history = set(history)
    frontier = list(closure)
    while frontier:
        t = frontier.pop()
        for other in list(closure) + list(history):
            joined = lub(t, other)
            if joined not in closure:
                closure.add(joined)
                frontier.append(joined)
    return closure


def _read_key(cursor: Any, key: Any) -> list[tuple[Any, list[tuple[Time, int]]]]:
    cursor.seek_key(key)
    if not cursor.key_valid() or cursor.key() != key:
        return []
    result = []
    while cursor.val_valid():
        result.append((cursor.val(), cursor.history()))
        cursor.step_val()
    return result


def _accumulate(history: list[tuple[Any, list[tuple[Time, int]]]], t: Time) -> dict[Any, int]:
    totals: dict[Any, int] = {}
    for val, times in history:
        for time, diff in times:
            if less_equal(time, t):
                totals[val] = checked_add(totals.get(val, 0), diff)
    return {val: d for val, d in totals.items() if d != 0}


class Reduce(Operator):
    def __init__(
        self,
        scope: "Scope",
        source: Arranged,
        logic: ReduceLogic,
        name: str = "reduce",
        merge_effort: MergeEffort = _UNSET,
    ) -> None:
        super().__init__(scope, name, inputs=1, outputs=1)
        scope.require(source.scope, f"{name} input")
        if merge_effort is _UNSET:
            merge_effort = scope.defaults.merge_effort
        minimum = Antichain.minimum(scope.shape)
        self.logic = logic
        self.input = source.handle.clone(through=minimum)
        self.trace = Trace(
            scope.shape,
            merge_effort=merge_effort,
            counters=scope.counters,
            name=f"{name}@{scope.worker_index}",
            sharding=source.handle.trace.sharding,
        )
        self.output = TraceHandle(self.trace, scope.worker_index)
        self.acknowledged = minimum
        self.pending: dict[Hashable, set[Time]] = {}
        scope.connect(source.stream, self, 0)

    def schedule(self) -> None:
        for message in self.inputs[0].pull():
            batch = message.data
            for u in batch.updates():  # type: ignore[union-attr]
                self.pending.setdefault(u.key, set()).add(u.time)
            self.acknowledged = batch.upper  # type: ignore[union-attr]

        upper = self.acknowledged
        output = self.outputs[0]
        if upper != self.trace.upper:
            corrections = self._evaluate(upper)
            batch = BatchBuilder(self.scope.shape).extend(corrections).seal(self.trace.upper, upper)
            self.trace.insert(batch, writer=self.index)
            output.send(batch.update_times(), batch)

        outstanding = Antichain(t for times in self.pending.values() for t in times)
        hold_capabilities(output, outstanding)
        self._compact(meet([upper, self.inputs[0].frontier(), outstanding]))

    def _evaluate(self, upper: Antichain) -> list[Update]:
        counters = self.scope.counters
        input_cursor = self.input.cursor_through(upper, counters)
        output_cursor = self.output.cursor(counters)
        corrections: list[Update] = []
        for key in sorted(self.pending):
            times = self.pending[key]
            if all(upper.less_equal(t) for t in times):
                continue
            inputs = _read_key(input_cursor, key)
            outputs = _read_key(output_cursor, key)
            history = {t for _, h in inputs for t, _ in h} | {t for _, h in outputs for t, _ in h}
            candidates = lub_closure(times, history)
            later = {t for t in candidates if upper.less_equal(t)}
            if later:
                self.pending[key] = later
            else:
                del self.pending[key]

            seen: dict[tuple, tuple] = {}
            for t in sorted(candidates - later):
                accumulated = _accumulate(inputs, t)
                arguments = sorted(accumulated.items())
                result = self._apply(key, arguments, seen)
                current = _accumulate(outputs, t)
                delta = Counter(result)
                delta.subtract(current)
                changes = [(val, d) for val, d in sorted(delta.items()) if d != 0]
                if changes:
                    outputs.extend((val, [(t, d)]) for val, d in changes)
                    corrections.extend(Update(key, val, t, d) for val, d in changes)
                counters.reduce_evaluations += 1
        return corrections

    def _apply(self, key: Any, arguments: list[tuple[Any, int]], seen: dict[tuple, tuple]) -> dict[Any, int]:
        produced: dict[Any, int] = {}
        if arguments:
            for val, d in self.logic(key, arguments):
                produced[val] = checked_add(produced.get(val, 0), d)
        result = tuple(sorted((v, d) for v, d in produced.items() if d != 0))
        previous = seen.setdefault(tuple(arguments), result)
        if previous != result:
            raise NondeterministicLogicError(
                f"{self.name}: key {key!r} produced {list(previous)} and then {list(result)} from input {arguments}"
            )
        return dict(result)

    def _compact(self, frontier: Antichain) -> None:
        for handle in (self.input, self.output):
            if handle.dropped:
                continue
            since = handle.since
            if frontier != since and frontier.dominates(since):
                handle.set_since(frontier)
        if not self.input.dropped:
            self.input.set_through(self.acknowledged)

    def shutdown(self) -> None:
        self.input.drop()
        self.output.drop()


def reduce_arranged(
    source: Arranged,
    logic: ReduceLogic,
    name: str = "reduce",
    merge_effort: MergeEffort = _UNSET,
) -> Arranged:
    """Applies ``logic(key, [(val, count), ...])`` to every key's accumulated values

    The result is itself an arrangement, shareable like any other.
    """
    op = Reduce(source.scope, source, logic, name, merge_effort)
    handle = TraceHandle(op.trace, source.scope.worker_index)
    source.scope.dataflow.construction_handles.append(handle)
    return Arranged(source.scope, op.stream(), handle)


def _count_logic(key: Any, values: list[tuple[Any, int]]) -> list[tuple[Any, int]]:
    total = sum(c for _, c in values)
    return [(total, 1)] if total != 0 else []


def _distinct_logic(key: Any, values: list[tuple[Any, int]]) -> list[tuple[Any, int]]:
    return [(val, 1) for val, c in values if c > 0]


def count(source: Arranged, name: str = "count") -> Arranged:
    """Maps each key to the total multiplicity of its values"""
    return reduce_arranged(source, _count_logic, name)


def distinct(source: Arranged, name: str = "distinct") -> Arranged:
    """Each present (key, val) once"""
    return reduce_arranged(source, _distinct_logic, name)
