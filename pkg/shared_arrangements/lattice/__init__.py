from .antichain import Antichain, beyond, frontier_insert, meet
from .compaction import grid, grid_bound, indistinguishable, rep
from .time import Product, Time, glb, less_equal, lub, minimum, shape_of

__all__ = [
    "Antichain",
    "beyond",
    "frontier_insert",
    "meet",
    "grid",
    "grid_bound",
    "indistinguishable",
    "rep",
    "Product",
    "Time",
    "glb",
    "less_equal",
    "lub",
    "minimum",
    "shape_of",
]
