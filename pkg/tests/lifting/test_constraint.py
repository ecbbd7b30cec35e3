import math

import numpy as np
import pytest

from backend.errors import DimensionMismatch, InvalidParameter
from backend.forms.tensor import random_form
from backend.lifting import (
    WitnessSequence,
    check_constraint,
    phase_aligned,
    random_witness,
    rescale_to_feasible,
)


def _scalars(xs, ys, ts):
    return WitnessSequence.from_lists([[[x]] for x in xs], [[[y]] for y in ys], ts)


def test_unit_scalars_sit_on_the_boundary():
    report = check_constraint(_scalars([1.0], [1.0], [1.0]))
    assert report.x_value == pytest.approx(2.0)
    assert report.y_value == pytest.approx(2.0)
    assert report.violation == pytest.approx(0.0, abs=1e-12)
    assert report.feasible()


def test_scaling_x_is_quadratic():
    report = check_constraint(_scalars([math.sqrt(2.0)], [1.0], [1.0]))
    assert report.x_value == pytest.approx(4.0)
    assert report.violation == pytest.approx(2.0)
    assert not report.feasible()


def test_weights_enter_column_and_row_sums():
    report = check_constraint(_scalars([1.0], [1.0], [2.0]))
    assert report.x_row == pytest.approx(1.0)
    assert report.x_col == pytest.approx(4.0)
    assert report.y_row == pytest.approx(0.25)
    assert report.y_col == pytest.approx(1.0)


def test_loose_flavor_adds_square_roots():
    report = check_constraint(_scalars([1.0], [1.0], [4.0]), flavor="loose")
    assert report.x_value == pytest.approx(1.0 + 4.0)
    assert report.y_value == pytest.approx(0.25 + 1.0)


def test_unknown_flavor_rejected():
    with pytest.raises(InvalidParameter):
        check_constraint(_scalars([1.0], [1.0], [1.0]), flavor="strict")


def test_rescale_lands_on_the_boundary():
    rng = np.random.default_rng(5)
    for flavor in ("standard", "loose"):
        w = random_witness(rng, 2, 3, 4, flavor=flavor)
        report = check_constraint(w, flavor)
        assert report.x_value == pytest.approx(2.0)
        assert report.y_value == pytest.approx(2.0)
        assert report.feasible()


def test_rescale_keeps_weights():
    w = _scalars([3.0], [0.1], [2.0])
    assert np.array_equal(rescale_to_feasible(w).ts, w.ts)


def test_phase_alignment_makes_terms_nonnegative():
    rng = np.random.default_rng(6)
    u = random_form(rng, 2, 2)
    w = random_witness(rng, 2, 2, 5)
    aligned = phase_aligned(u, w)
    values = aligned.values(u)
    assert np.allclose(values.imag, 0.0, atol=1e-12)
    assert np.all(values.real >= -1e-12)
    assert np.allclose(np.abs(values), np.abs(w.values(u)))
    assert check_constraint(aligned).value == pytest.approx(check_constraint(w).value)


def test_max_weight():
    assert _scalars([1.0, 1.0], [1.0, 1.0], [0.25, 3.0]).max_weight == pytest.approx(4.0)
    assert WitnessSequence.empty(2, 2).max_weight == 1.0


def test_witness_validation():
    with pytest.raises(InvalidParameter):
        _scalars([1.0], [1.0], [0.0])
    with pytest.raises(DimensionMismatch):
        WitnessSequence(np.zeros((2, 1, 1)), np.zeros((1, 1, 1)), np.ones(2))
    with pytest.raises(DimensionMismatch):
        WitnessSequence.from_lists([np.eye(2), np.eye(3)], [np.eye(1), np.eye(1)], [1.0, 1.0])


def test_witness_json_dict_reloads():
    rng = np.random.default_rng(7)
    w = random_witness(rng, 2, 1, 3)
    again = WitnessSequence.from_dict(w.to_dict())
    assert np.array_equal(again.xs, w.xs)
    assert np.array_equal(again.ys, w.ys)
    assert np.array_equal(again.ts, w.ts)
