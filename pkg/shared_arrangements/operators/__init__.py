from shared_arrangements.operators.collection import Collection, new_input
from shared_arrangements.operators.iterate import Feedback, Variable, iterate
from shared_arrangements.operators.join import Join, join_arranged
from shared_arrangements.operators.reduce import Reduce, count, distinct, lub_closure, reduce_arranged

__all__ = [
    "Collection",
    "Feedback",
    "Join",
    "Reduce",
    "Variable",
    "count",
    "distinct",
    "iterate",
    "join_arranged",
    "lub_closure",
    "new_input",
    "reduce_arranged",
]
