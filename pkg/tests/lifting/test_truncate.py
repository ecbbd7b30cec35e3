import numpy as np
import pytest

from backend.errors import InvalidParameter, PreconditionViolation
from backend.forms.tensor import scalar_form
from backend.lifting import (
    WitnessSequence,
    check_constraint,
    random_witness,
    rescale_to_feasible,
    truncate,
    truncation_threshold,
)


def _scalars(xs, ys, ts):
    return WitnessSequence.from_lists([[[x]] for x in xs], [[[y]] for y in ys], ts)


def test_threshold():
    assert truncation_threshold(1.0, 1.0, 0.5) == pytest.approx(16.0)
    assert truncation_threshold(2.0, 3.0, 0.25) == pytest.approx(192.0)


def test_unit_weights_survive():
    rng = np.random.default_rng(11)
    w = random_witness(rng, 2, 2, 4, log_t_scale=0.0)
    res = truncate(w, 1.0, 1.0, 0.5)
    assert len(res.witness) == len(w)
    assert res.rescaled is None
    assert not res.full_drop
    assert np.array_equal(res.witness.xs, w.xs)


def test_single_extreme_element_drops_everything():
    w = rescale_to_feasible(_scalars([1.0], [1.0], [32.0]))
    res = truncate(w, 1.0, 1.0, 0.5, u=scalar_form())
    assert len(res.witness) == 0
    assert res.dropped_large == [0]
    assert res.full_drop
    assert res.kept_value == 0


def test_mixed_witness_splits_and_rescales():
    u = scalar_form()
    w = rescale_to_feasible(_scalars([1.0, 0.2, 0.3], [1.0, 0.4, 0.1], [1.0, 50.0, 1 / 40]))
    res = truncate(w, 1.0, 1.0, 0.5, u=u)
    assert res.dropped_large == [1]
    assert res.dropped_small == [2]
    assert check_constraint(res.witness).feasible()
    assert res.rescaled_constraint.feasible()
    assert res.kept_value + res.dropped_value == pytest.approx(res.input_value)
    # each dropped term picks up a factor T/(4η_E η_F) = 4
    assert res.rescaled_value == pytest.approx(4.0 * res.dropped_value)


def test_rejects_infeasible_input():
    with pytest.raises(PreconditionViolation):
        truncate(_scalars([2.0], [1.0], [1.0]), 1.0, 1.0, 0.5)


def test_parameter_ranges():
    w = _scalars([1.0], [1.0], [1.0])
    with pytest.raises(InvalidParameter):
        truncate(w, 1.0, 1.0, 1.0)
    with pytest.raises(InvalidParameter):
        truncate(w, 0.5, 1.0, 0.5)


def _with_heavy_element(rng, scale):
    """Three moderate scalar elements plus one at t = 10³ carrying scale² of a typical value."""
    t_big = 1e3
    xs = rng.uniform(0.5, 1.0, 4)
    ys = rng.uniform(0.5, 1.0, 4)
    ts = np.exp(0.3 * rng.standard_normal(4))
    xs[0] *= scale / np.sqrt(t_big)
    ys[0] *= scale * np.sqrt(t_big)
    ts[0] = t_big
    return rescale_to_feasible(_scalars(xs, ys, ts))


def test_heavy_element_is_cut_and_value_retained():
    u = scalar_form()
    eps = 0.5
    retained = 0
    for k, scale in enumerate(np.geomspace(0.02, 1.0, 20)):
        rng = np.random.default_rng(200 + k)
        w = _with_heavy_element(rng, scale)
        res = truncate(w, 1.0, 1.0, eps, u=u)

        assert 0 in res.dropped_large
        assert check_constraint(res.witness).feasible()
        assert abs(res.kept_value - res.witness.value(u)) <= 1e-12

        total = abs(res.input_value)
        if abs(res.rescaled_value) <= eps / 2 * total:
            retained += 1
            assert abs(res.kept_value) >= (1 - eps) * total
    assert retained > 0
