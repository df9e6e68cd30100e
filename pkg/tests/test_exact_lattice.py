import math

import pytest

from gr2.errors import AmbientMismatch
from gr2.exact_lattice import (
    IntMatrix, LatticeBasis, QuotientLattice, congruence_lattice, hnf, integer_kernel,
    invariant_factors, is_saturated, lattice_equal, lattice_index, quotient_reduce, saturation, snf,
    span_closure, xgcd,
)


def test_xgcd():
    x, y, d = xgcd(12, 18)
    assert d == 6
    assert 12 * x + 18 * y == 6
    assert xgcd(-4, 6)[2] == 2


def test_membership_and_coordinates():
    lattice = LatticeBasis(2, [{0: 2}, {1: 3}])
    assert {0: 4, 1: -3} in lattice
    assert {0: 1} not in lattice
    assert lattice.coordinates({0: 4, 1: -3}) == [2, -1]
    assert lattice.coordinates({1: 1}) is None


def test_hnf_is_canonical():
    a = LatticeBasis(2, [{0: 2, 1: 4}, {1: 6}])
    b = LatticeBasis(2, [{0: 2, 1: 10}, {1: -6}])
    assert a.hnf_rows() == [{0: 2, 1: 4}, {1: 6}]
    assert lattice_equal(a, b)
    assert a.digest() == b.digest()


def test_hnf_of_matrix():
    m = IntMatrix.from_dense([[2, 4], [0, 6], [2, 10]])
    assert hnf(m).to_dense() == [[2, 4], [0, 6]]


def test_integer_kernel():
    m = IntMatrix.from_dense([[1, 2, 3]])
    kernel = integer_kernel(m)
    assert kernel.rank == 2
    for row in kernel.echelon_rows():
        assert sum(c * (k + 1) for k, c in row.items()) == 0
    assert is_saturated(kernel)


def test_invariant_factors_match_smith_form():
    m = IntMatrix.from_dense([[12, 6, 4], [3, 9, 6], [2, 16, 14]])
    assert invariant_factors(m) == (1, 10, 30)
    diag, u, v = snf(m)
    assert diag == (1, 10, 30)


def test_index_and_saturation():
    full = LatticeBasis(2, [{0: 1}, {1: 1}])
    sub = LatticeBasis(2, [{0: 2}, {1: 3}])
    assert lattice_index(full, sub) == 6
    assert lattice_index(full, LatticeBasis(2, [{0: 1}])) == math.inf
    assert not is_saturated(LatticeBasis(2, [{0: 2}]))
    assert lattice_equal(saturation(LatticeBasis(2, [{0: 2, 1: 4}])), LatticeBasis(2, [{0: 1, 1: 2}]))


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        lattice_equal(LatticeBasis(2), LatticeBasis(3))
    with pytest.raises(AmbientMismatch):
        LatticeBasis(2).add_vector({5: 1})


def test_congruence_lattice():
    lattice = congruence_lattice(2, [({0: 1, 1: 1}, 2)])
    assert {0: 1, 1: 1} in lattice
    assert {0: 2} in lattice
    assert {0: 1} not in lattice
    assert lattice_index(LatticeBasis(2, [{0: 1}, {1: 1}]), lattice) == 2


def test_span_closure_under_a_swap():
    swap = IntMatrix(2, 2, [{1: 1}, {0: 1}])
    closure = span_closure([{0: 1}], [swap])
    assert lattice_equal(closure, LatticeBasis(2, [{0: 1}, {1: 1}]))
    assert span_closure([{0: 1, 1: 1}], [swap]).rank == 1


def test_restrict_to_coordinates():
    lattice = LatticeBasis(3, [{0: 1, 1: 1}, {1: 1, 2: -1}])
    restricted = lattice.restrict([1, 2])
    assert lattice_equal(restricted, LatticeBasis(3, [{1: 1, 2: -1}]))


def test_free_quotient():
    quotient = QuotientLattice(3, LatticeBasis(3, [{0: 1, 1: 1}]))
    assert quotient.rank == 2
    assert quotient.coordinate_columns == (1, 2)
    assert quotient.reduce({0: 1}) == {0: -1}
    assert quotient.reduce({0: 1, 1: 1}) == {}
    assert quotient_reduce(quotient, {0: 2, 2: 5}) == {0: -2, 1: 5}
    assert quotient.torsion == ()


def test_torsion_quotient():
    quotient = QuotientLattice(2, LatticeBasis(2, [{0: 2}]))
    assert quotient.torsion == (2,)
    assert quotient.reduce({0: 3}) == {0: 1}
