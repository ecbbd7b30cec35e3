import math
from dataclasses import replace

import numpy as np
import pytest

from backend.errors import InvalidParameter
from backend.forms.tensor import random_form, scalar_form
from backend.lifting import (
    WitnessSequence,
    dense_square_norms,
    lift,
    lifted_square_norms,
    phase_aligned,
    pipeline_dimension,
    random_witness,
    verify_lift,
)
from backend.lines import line_matrix, line_value


def test_unit_weights_at_d1_reproduce_the_witness():
    rng = np.random.default_rng(1)
    w = random_witness(rng, 2, 2, 3, log_t_scale=0.0)
    lr = lift(w, 1)
    assert len(lr) == len(w)
    for j in range(len(lr)):
        assert np.allclose(lr.lifted_x(j), w.xs[j])
        assert np.allclose(lr.lifted_y(j), w.ys[j])


def test_lift_size_matches_line_matrix_support():
    w = WitnessSequence.from_lists([[[0.5]]], [[[0.5]]], [math.sqrt(3.0)])
    lr = lift(w, 8)
    assert len(lr) == np.count_nonzero(line_matrix(8, math.sqrt(3.0))) == 8
    assert all(i == 0 for i, _ in lr.index_map)


def test_lifted_elements_are_kron_products():
    w = WitnessSequence.from_lists([np.diag([1.0, 2.0])], [[[3.0]]], [2.0])
    lr = lift(w, 4)
    for j in range(len(lr)):
        unit = np.zeros((4, 4))
        unit[lr.row[j], lr.col[j]] = lr.weight[j]
        assert np.allclose(lr.lifted_x(j), np.kron(w.xs[0], unit))
        assert np.allclose(lr.lifted_y(j), np.kron(w.ys[0] / 2.0, unit))


def test_block_norms_match_dense_norms():
    rng = np.random.default_rng(2)
    w = random_witness(rng, 2, 2, 3)
    lr = lift(w, 6)
    fast = lifted_square_norms(lr)
    dense = dense_square_norms(lr)
    for key in fast:
        assert fast[key] == pytest.approx(dense[key], rel=1e-10, abs=1e-12)


def test_unit_weights_lose_nothing():
    rng = np.random.default_rng(3)
    u = random_form(rng, 2, 2)
    w = random_witness(rng, 2, 2, 4, log_t_scale=0.0)
    report = verify_lift(u, w, lift(w, 16))
    assert report.lifted_value == pytest.approx(w.value(u), rel=1e-10)
    assert report.passed


def test_scalar_form_closed_form():
    t = 2.5
    w = WitnessSequence.from_lists([[[1.0]]], [[[1.0]]], [t])
    report = verify_lift(scalar_form(), w, lift(w, 64))
    assert report.lifted_value.real == pytest.approx(line_value(64, t) / t, rel=1e-10)
    assert report.identity_ok


def test_random_lift_passes_every_check():
    rng = np.random.default_rng(4)
    u = random_form(rng, 2, 2)
    w = random_witness(rng, 2, 2, 5)
    for d in (8, 64, 512):
        report = verify_lift(u, w, lift(w, d))
        assert report.constraint_ok, report.slacks
        assert report.identity_ok
        assert report.deficit_ok


def test_closed_form_and_state_route_agree():
    rng = np.random.default_rng(8)
    u = random_form(rng, 2, 2)
    w = random_witness(rng, 2, 2, 3)
    lr = lift(w, 12)
    a = verify_lift(u, w, lr, via_state_form_value=True)
    b = verify_lift(u, w, lr, via_state_form_value=False)
    assert a.lifted_value == pytest.approx(b.lifted_value, rel=1e-10)


def test_deficit_shrinks_with_dimension():
    rng = np.random.default_rng(9)
    u = random_form(rng, 2, 2)
    w = phase_aligned(u, random_witness(rng, 2, 2, 4))
    deficits = [verify_lift(u, w, lift(w, d)).deficit for d in (8, 64, 512)]
    assert deficits[0] > deficits[1] > deficits[2] >= -1e-12


def test_lift_rejects_empty_witness():
    with pytest.raises(InvalidParameter):
        lift(WitnessSequence.empty(1, 1), 4)


def test_dense_lift_guarded():
    w = WitnessSequence.from_lists([[[1.0]]], [[[1.0]]], [1.0])
    with pytest.raises(InvalidParameter):
        lift(w, 100).xs_lifted()


def test_pipeline_dimension():
    assert pipeline_dimension(1.0, 0.0, 0.5) == 1.0
    assert pipeline_dimension(3.0, 0.5, 0.5) == pytest.approx(4.0)
    assert pipeline_dimension(1e6, 10.0, 0.01) == math.inf
    with pytest.raises(InvalidParameter):
        pipeline_dimension(2.0, -1.0, 0.5)


def test_identity_tolerance_is_configurable():
    rng = np.random.default_rng(10)
    u = random_form(rng, 2, 2)
    w = random_witness(rng, 2, 2, 3)
    report = verify_lift(u, w, lift(w, 8), identity_rtol=1e-6)
    assert report.identity_rtol == 1e-6
    loose = replace(report, identity_error=1e-8)
    assert loose.identity_ok
    assert not replace(loose, identity_rtol=1e-10).identity_ok


@pytest.mark.slow
@pytest.mark.parametrize("d", [8, 64, 512])
def test_fifty_random_lifts(d):
    for k in range(50):
        rng = np.random.default_rng(1000 + k)
        n, m, length = (int(v) for v in rng.integers(1, [4, 4, 5]))
        u = random_form(rng, n, m)
        w = random_witness(rng, n, m, length)
        report = verify_lift(u, w, lift(w, d))
        assert min(report.slacks.values()) >= -1e-10, (k, report.slacks)
        assert report.identity_error <= 1e-10, (k, report.identity_error)
