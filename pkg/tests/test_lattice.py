import pytest

from shared_arrangements.errors import TimeShapeError
from shared_arrangements.harness.verify import LATTICE, run_suite
from shared_arrangements.lattice import Antichain, Product, glb, grid_bound, indistinguishable, less_equal, lub, rep
from shared_arrangements.lattice.time import advance_round, enter_time, leave_time, less_than


def test_product_order_is_coordinate_wise():
    assert less_equal(Product(1, 2), Product(1, 3))
    assert not less_equal(Product(2, 0), Product(1, 5))
    assert not less_equal(Product(1, 5), Product(2, 0))
    assert less_than(Product(0, 0), Product(0, 1))
    assert not less_than(Product(1, 1), Product(1, 1))


def test_lub_and_glb():
    assert lub(Product(2, 0), Product(1, 5)) == Product(2, 5)
    assert glb(Product(2, 0), Product(1, 5)) == Product(1, 0)
    assert lub(3, 7) == 7
    assert glb(3, 7) == 3


def test_mixed_shapes_raise():
    with pytest.raises(TimeShapeError):
        less_equal(1, Product(1, 0))


def test_scope_time_mappings():
    assert enter_time(4) == Product(4, 0)
    assert leave_time(Product(4, 9)) == 4
    assert advance_round(Product(4, 0)) == Product(4, 1)


def test_antichain_keeps_minimal_elements():
    frontier = Antichain([Product(1, 1), Product(0, 2), Product(2, 2)])
    assert list(frontier) == [Product(0, 2), Product(1, 1)]
    assert frontier.less_equal(Product(1, 3))
    assert not frontier.less_equal(Product(0, 1))
    assert Antichain([3, 1]) == Antichain([1])


def test_antichain_dominance():
    assert Antichain([5]).dominates(Antichain([3]))
    assert not Antichain([3]).dominates(Antichain([5]))
    assert Antichain.empty().dominates(Antichain([5]))
    assert not Antichain([5]).dominates(Antichain.empty())
    assert Antichain.minimum(Product).elements == (Product(0, 0),)


def test_rep_advances_to_the_frontier():
    assert rep(Antichain([5]), 2) == 5
    assert rep(Antichain([5]), 7) == 7
    assert rep(Antichain([Product(2, 0)]), Product(0, 3)) == Product(2, 3)
    assert rep(Antichain([Product(1, 0), Product(0, 1)]), Product(0, 0)) == Product(0, 0)
    assert rep(Antichain.empty(), Product(3, 1)) == Product(3, 1)


def test_indistinguishable_times_share_a_representative():
    frontier = Antichain([5])
    assert indistinguishable(frontier, 1, 3, grid_bound(1, 3, 5))
    assert rep(frontier, 1) == rep(frontier, 3)
    assert not indistinguishable(frontier, 1, 6, grid_bound(1, 6, 5))


def test_rep_compares_like_the_original_beyond_the_frontier():
    frontier = Antichain([Product(1, 2), Product(3, 0)])
    t = Product(0, 1)
    r = rep(frontier, t)
    for outer in range(6):
        for inner in range(6):
            f = Product(outer, inner)
            if frontier.less_equal(f):
                assert less_equal(t, f) == less_equal(r, f)


def test_lattice_suite_passes():
    report = run_suite(LATTICE, seed=7, iterations=200)
    assert report.passed
    assert report.cases == 200


def test_lattice_suite_is_reproducible():
    assert run_suite(LATTICE, seed=3, iterations=20) == run_suite(LATTICE, seed=3, iterations=20)
