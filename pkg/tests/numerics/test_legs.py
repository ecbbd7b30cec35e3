import numpy as np
import pytest

from backend.errors import DimensionMismatch
from backend.numerics import kron, matrix_unit, partial_matrix_elements, split_legs


def test_kron_puts_first_factor_on_outer_leg():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.eye(3)
    big = kron(a, b)
    a4, d = split_legs(big, 2)
    assert d == 3
    assert a4[1, 0, 0, 0] == 3.0
    assert a4[1, 0, 0, 1] == 0.0


def test_split_legs_rejects_bad_size():
    with pytest.raises(DimensionMismatch):
        split_legs(np.eye(5), 2)


def test_partial_matrix_elements_of_product():
    x = np.array([[0.0, 1.0], [2.0, 0.0]])
    big = kron(x, matrix_unit(3, 0, 2))
    c = partial_matrix_elements(big, 2, np.eye(3), np.eye(3))
    assert c[0, 1, 0, 2] == 1.0
    assert c[1, 0, 0, 2] == 2.0
    assert np.count_nonzero(c) == 2


def test_kron_of_diagonals():
    assert np.array_equal(kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])), np.diag([3.0, 4.0, 6.0, 8.0]))


def test_kron_shape_law():
    assert kron(np.ones((2, 3)), np.ones((4, 5))).shape == (8, 15)
