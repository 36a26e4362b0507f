"""Fixed-point iteration

The loop variable starts as the entered source collection; each round it
becomes the body's result from the round before. The feedback edge carries
only the changes ``result - source``, advanced by one round, so the loop goes
quiet once the result stops changing.
"""

from typing import TYPE_CHECKING, Callable, Optional

from loguru import logger

from shared_arrangements.arrangement.arrange import hold_capabilities
from shared_arrangements.dataflow.channels import stamp_of
from shared_arrangements.dataflow.operator import Operator
from shared_arrangements.errors import IterationLimitError, ScopeError
from shared_arrangements.lattice.antichain import Antichain
from shared_arrangements.lattice.time import Product, advance_round
from shared_arrangements.trace.batch import consolidate
from shared_arrangements.trace.update import Update

if TYPE_CHECKING:
    from shared_arrangements.dataflow.scope import Scope
    from shared_arrangements.operators.collection import Collection

__all__ = ["Feedback", "Variable", "iterate"]


class Feedback(Operator):
    """Delays updates by one round once their round is complete"""

    summary = staticmethod(advance_round)  # type: ignore[assignment]

    def __init__(self, scope: "Scope", name: str, max_rounds: int) -> None:
        super().__init__(scope, name, inputs=1, outputs=1)
        self.max_rounds = max_rounds
        self.buffer: list[Update] = []

    def schedule(self) -> None:
        for message in self.inputs[0].pull():
            self.buffer.extend(message.data)  # type: ignore[arg-type]

        output = self.outputs[0]
        frontier = self.inputs[0].frontier()
        ready = [u for u in self.buffer if not frontier.less_equal(u.time)]
        if ready:
            self.buffer = [u for u in self.buffer if frontier.less_equal(u.time)]
            advanced = []
            for k, v, t, d in consolidate(ready, Antichain.empty()):
                t = advance_round(t)  # type: ignore[arg-type]
                if t.inner > self.max_rounds:
                    raise IterationLimitError(f"{self.name}: no fixed point after {self.max_rounds} rounds at {t}")
                advanced.append(Update(k, v, t, d))
            if advanced:
                output.send(stamp_of(advanced), advanced)
        hold_capabilities(output, Antichain(advance_round(u.time) for u in self.buffer))  # type: ignore[arg-type]


class Variable:
    """A collection defined in terms of itself one round earlier"""

    def __init__(self, source: "Collection", name: str = "variable", max_rounds: Optional[int] = None) -> None:
        from shared_arrangements.operators.collection import Collection

        scope = source.scope
        if scope.shape is not Product:
            raise ScopeError(f"{name}: loop variables live in an iteration scope")
        rounds = max_rounds if max_rounds is not None else scope.defaults.iterate_max_rounds
        self.source = source
        self.feedback = Feedback(scope, f"{name}.feedback", rounds)
        self.collection = source.concat(Collection(scope, self.feedback.stream()))

    def set(self, result: "Collection") -> "Collection":
        """Closes the loop; returns ``result``"""
        self.source.scope.require(result.scope, f"{self.feedback.name} result")
        delta = result.concat(self.source.negate())
        delta.scope.connect(delta.stream, self.feedback, 0)
        return result


def iterate(
    collection: "Collection",
    body: Callable[["Collection"], "Collection"],
    name: str = "iterate",
    max_rounds: Optional[int] = None,
) -> "Collection":
    """Applies ``body`` until its result no longer changes and returns that fixed point"""
    child = collection.scope.iterative(name)
    entered = collection.enter(child)
    variable = Variable(entered, name, max_rounds)
    result = variable.set(body(variable.collection))
    logger.debug(f"{name}: loop closed on worker {child.worker_index}")
    return result.leave()
