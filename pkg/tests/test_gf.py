import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shallowdecode.gf import (FpMatrix, FpVector, all_vectors, check_modulus, in_affine_image,
                              index_of, rank, rank_array, restrict_columns, row_reduce)

PRIMES = [2, 3, 5, 7]


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    p = draw(st.sampled_from(PRIMES))
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return FpMatrix(p, np.array(vals).reshape(r, c))


def test_modulus_must_be_small_prime():
    assert check_modulus(65521) == 65521
    for bad in (1, 4, 65537 * 2, 1 << 17):
        with pytest.raises(ValueError):
            check_modulus(bad)


def test_containers_reduce_and_freeze():
    v = FpVector(3, [4, -1, 2])
    assert list(v) == [1, 2, 2]
    with pytest.raises(ValueError):
        v.entries[0] = 0
    m = FpMatrix(5, [[6, 7], [8, 9]])
    assert m.entries.tolist() == [[1, 2], [3, 4]]


def test_rank_examples():
    assert rank(FpMatrix(2, [[1, 1], [1, 1]])) == 1
    assert rank(FpMatrix(3, [[1, 2], [2, 1]])) == 1      # second row is 2 * first
    assert rank(FpMatrix(5, [[1, 2], [2, 1]])) == 2
    assert rank(FpMatrix.identity(7, 4)) == 4
    assert rank(FpMatrix.zeros(2, 3, 3)) == 0


def test_pivot_rule_is_leftmost_then_topmost():
    rref, piv = row_reduce(np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]]), 2)
    assert piv == [0, 1]
    assert rref.tolist() == [[1, 0, 1], [0, 1, 1], [0, 0, 0]]


def test_rank_over_p_matches_rational_rank_for_unimodular_matrices():
    m = np.array([[2, 1, 0], [1, 1, 0], [0, 0, 1]])   # det 1
    for p in PRIMES:
        assert rank_array(m, p) == 3


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_is_transpose_invariant_and_bounded(m):
    r = rank(m)
    assert r == rank(m.transpose())
    assert r <= min(m.shape)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_image_size(m):
    # |image of F_p^cols| = p^rank, counted by enumeration
    if m.p ** m.cols > 4096:
        return
    image = {tuple(row) for row in m.apply(all_vectors(m.p, m.cols)).tolist()}
    assert len(image) == m.p ** rank(m)


@settings(max_examples=100, deadline=None)
@given(matrices(), st.data())
def test_in_affine_image_agrees_with_enumeration(m, data):
    if m.p ** m.cols > 4096:
        return
    v = data.draw(st.lists(st.integers(0, m.p - 1), min_size=m.rows, max_size=m.rows))
    w = data.draw(st.lists(st.integers(0, m.p - 1), min_size=m.rows, max_size=m.rows))
    image = {tuple(row) for row in ((m.apply(all_vectors(m.p, m.cols)) + v) % m.p).tolist()}
    assert in_affine_image(m, v, w) == (tuple(w) in image)


def test_restrict_columns():
    m = FpMatrix(3, [[1, 2, 0], [0, 1, 2]])
    assert restrict_columns(m, [2, 0]).entries.tolist() == [[1, 0], [0, 2]]
    assert restrict_columns(m, []).shape == (2, 0)
    assert rank(restrict_columns(m, [])) == 0
    with pytest.raises(IndexError):
        restrict_columns(m, [3])


def test_affine_image_dimension_mismatch():
    with pytest.raises(ValueError):
        in_affine_image(FpMatrix(2, [[1, 0]]), [0, 0], [1])


def test_enumeration_is_little_endian():
    vs = all_vectors(3, 2)
    assert vs.shape == (9, 2)
    assert vs[5].tolist() == [2, 1]
    assert all(index_of(v, 3) == i for i, v in enumerate(vs))
