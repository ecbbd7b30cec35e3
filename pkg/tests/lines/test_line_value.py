import math

import numpy as np
import pytest

from backend.lines import (
    analytic_lower_bound,
    fit_constant,
    line_matrix,
    line_value,
    line_vector,
    relative_deficit,
    simplified_lower_bound,
)
from backend.states import normalization_constant

GRID_T2 = (0.1, 1 / 3, 0.5, 1.0, 2.4, 3.0, 10.0)


def test_unit_weight_value_is_one():
    for d in (1, 8, 100):
        assert line_value(d, 1.0) == pytest.approx(1.0, abs=1e-14)


def test_value_matches_double_sum():
    t = math.sqrt(3.0)
    L = line_matrix(8, t)
    i = np.arange(1, 9)
    expected = np.sum(L / np.sqrt(np.outer(i, i))) / normalization_constant(8)
    assert line_value(8, t) == pytest.approx(expected, rel=1e-13)


def test_line_vector_is_unit():
    assert np.linalg.norm(line_vector(30)) == pytest.approx(1.0)


def test_sandwich_on_grid():
    for t2 in GRID_T2:
        t = math.sqrt(t2)
        for d in range(1, 65):
            value = line_value(d, t)
            assert analytic_lower_bound(d, t) - 1e-10 <= value <= t + 1e-10


def test_simplified_below_analytic():
    for t2 in GRID_T2:
        t = math.sqrt(t2)
        for d in (1, 2, 8, 64, 4096):
            assert simplified_lower_bound(d, t) <= analytic_lower_bound(d, t) + 1e-10


def test_deficit_decays_at_sqrt3():
    t = math.sqrt(3.0)
    deficits = [relative_deficit(2**k, t) for k in range(3, 13)]
    assert all(b < a for a, b in zip(deficits, deficits[1:]))


def test_scaled_deficit_is_stable():
    t = math.sqrt(3.0)
    scaled = [relative_deficit(2**k, t) * (1 + math.log(2**k)) for k in range(6, 13)]
    assert max(scaled) <= 1.2 * min(scaled)


def test_fit_constant_zero_at_unit_weight():
    assert fit_constant([1.0], [1, 4, 64]) == pytest.approx(0.0, abs=1e-12)


def test_fit_constant_grows_with_grid():
    t = [math.sqrt(3.0)]
    small = fit_constant(t, [64, 128])
    large = fit_constant(t + [math.sqrt(0.1)], [8, 64, 128])
    assert 0 < small <= large


def test_tiny_weight_value():
    # only row 1 is nonzero: value = t² z_1 Σ_j z_j
    for t in (1e-6, 1e-7):
        z = line_vector(3)
        expected = t * t * z[0] * z.sum()
        assert line_value(3, t) == pytest.approx(expected, rel=1e-9)
