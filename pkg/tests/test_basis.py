"""Basis enumeration: ordering, slicing, projections."""

import math

import numpy as np
import pytest

from landau_hermite.basis import BasisTruncation, enumerate_basis


def test_graded_lex_ordering_d2_n2():
    basis = enumerate_basis(2, 2)
    assert list(basis.ordering) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


def test_graded_lex_ordering_d3_n2_prefix():
    basis = enumerate_basis(3, 2)
    assert list(basis.ordering[:4]) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)]
    # within a degree, lexicographically ascending
    degree2 = [a for a in basis.ordering if sum(a) == 2]
    assert degree2 == sorted(degree2)


@pytest.mark.parametrize(
    "dimension,max_degree,expected",
    [(2, 16, 153), (3, 8, 165), (2, 0, 1), (3, 1, 4)],
)
def test_size_is_binomial(dimension, max_degree, expected):
    basis = enumerate_basis(dimension, max_degree)
    assert basis.size == expected == math.comb(max_degree + dimension, dimension)


def test_index_of_inverts_ordering():
    basis = enumerate_basis(3, 5)
    for i, alpha in enumerate(basis.ordering):
        assert basis.index_of(alpha) == i
    with pytest.raises(KeyError):
        basis.index_of((0, 0, 6))


def test_level_slices_are_contiguous_and_graded():
    basis = enumerate_basis(2, 7)
    total = 0
    for k in range(8):
        s = basis.level_slice(k)
        assert s.start == total
        assert all(sum(a) == k for a in basis.ordering[s])
        total = s.stop
    assert total == basis.size


def test_unit_and_projections():
    basis = enumerate_basis(2, 4)
    v = basis.unit((2, 1)) * 3.0 + basis.unit((0, 0))
    assert v[basis.index_of((2, 1))] == 3.0
    level3 = basis.project_level(v, 3)
    assert np.count_nonzero(level3) == 1
    assert float(np.linalg.norm(level3)) == 3.0
    cumulative = basis.project_cumulative(v, 2)
    assert float(cumulative[basis.index_of((2, 1))]) == 0.0
    assert float(cumulative[basis.index_of((0, 0))]) == 1.0


def test_level_norms_partition_l2():
    rng = np.random.default_rng(7)
    basis = enumerate_basis(3, 6)
    v = rng.normal(size=basis.size)
    norms = basis.level_norms(v)
    assert norms.shape == (7,)
    assert math.isclose(
        float(np.linalg.norm(v)) ** 2, float(np.sum(norms**2)), rel_tol=1e-14
    )


def test_ordering_as_lists_round_trips():
    basis = enumerate_basis(2, 3)
    lists = basis.ordering_as_lists()
    assert lists[0] == [0, 0]
    assert [tuple(a) for a in lists] == list(basis.ordering)


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        BasisTruncation(1, 4)
    with pytest.raises(ValueError):
        BasisTruncation(2, -1)
