import math

import numpy as np
import pytest

from backend.errors import InvalidParameter
from backend.lines import line_entries, line_matrix, line_matrix_sq


def test_unit_weight_is_identity():
    for d in (1, 5, 17):
        assert np.array_equal(line_matrix_sq(d, 1.0), np.eye(d))


def test_sqrt3_block_staircase():
    L = line_matrix_sq(8, 3.0)
    expected = np.zeros((8, 8))
    expected[0:3, 0] = 1.0
    expected[3:6, 1] = 1.0
    expected[6:8, 2] = 1.0
    assert np.array_equal(L, expected)


def test_small_weight_interval_formula():
    assert np.array_equal(line_matrix_sq(2, 0.5), [[0.5, 0.5], [0.0, 0.0]])


def test_total_mass():
    for d, t2 in [(8, 3.0), (8, 2.4), (10, 1 / 3), (7, 10.0)]:
        assert line_matrix_sq(d, t2).sum() == pytest.approx(min(d, d * t2))


def test_sums_bounded_on_grid():
    for t2 in (0.1, 1 / 3, 0.5, 1.0, 2.4, 3.0, 10.0):
        for d in range(1, 65):
            L = line_matrix_sq(d, t2)
            assert L.sum(axis=1).max() <= 1 + 1e-12
            assert L.sum(axis=0).max() <= t2 + 1e-12


def test_sparse_entries_match_dense():
    rows, cols, vals = line_entries(50, 2.4)
    dense = line_matrix_sq(50, 2.4)
    assert np.count_nonzero(dense) == vals.size
    assert np.array_equal(dense[rows, cols], vals)


def test_line_matrix_takes_t():
    assert np.array_equal(line_matrix(8, math.sqrt(4.0)), line_matrix_sq(8, 4.0))


def test_rejects_non_positive_t():
    with pytest.raises(InvalidParameter):
        line_matrix_sq(4, 0.0)
    with pytest.raises(InvalidParameter):
        line_matrix_sq(0, 1.0)


def test_tiny_weight_keeps_true_entries():
    t = 1e-7
    L = line_matrix(2, t)
    assert L[0, 0] == pytest.approx(t * t, rel=1e-12)
    assert L[0, 1] == pytest.approx(t * t, rel=1e-12)
    assert L[1].sum() == 0.0


def test_tiny_weight_row_mass():
    for t in (1e-6, 1e-7, 1e-9):
        for d in (1, 3, 40):
            L = line_matrix(d, t)
            assert L.sum() == pytest.approx(d * t * t, rel=1e-9)
            assert np.allclose(L[0], t * t, rtol=1e-9, atol=0.0)
