from dataclasses import replace

import numpy as np
import pytest

from backend.errors import InvalidParameter, PreconditionViolation
from backend.forms.tensor import random_form, scalar_form
from backend.lifting import WitnessSequence, random_witness
from backend.numerics import matrix_unit
from backend.randmat import MCReport, mc_ht, mc_jp


def test_ht_scalar_passes():
    report = mc_ht([[[1.0]]], gamma=1.0, eps=1.0, samples=50, seed=1)
    assert report.dim == 45
    assert report.bound == pytest.approx(8.0)
    assert np.isfinite(report.mean)
    assert report.passed


def test_ht_diagonal_units_pass():
    a = [matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)]
    report = mc_ht(a, gamma=1.0, eps=1.0, samples=30, seed=2)
    assert report.passed


def test_ht_is_quadratic_in_the_coefficients():
    full = mc_ht([[[1.0]]], gamma=1.0, eps=1.0, samples=20, seed=3, d=16)
    half = mc_ht([[[0.5]]], gamma=1.0, eps=1.0, samples=20, seed=3, d=16)
    assert half.mean == pytest.approx(full.mean / 4, rel=1e-12)


def test_ht_precondition():
    with pytest.raises(PreconditionViolation):
        mc_ht([[[2.0]]], gamma=1.0, eps=1.0, samples=2)
    with pytest.raises(InvalidParameter):
        mc_ht([[[1.0]]], gamma=2.0, eps=1.0, samples=2)


def test_ht_is_reproducible():
    a = mc_ht([[[1.0]]], gamma=1.0, eps=1.0, samples=10, seed=4, d=8)
    b = mc_ht([[[1.0]]], gamma=1.0, eps=1.0, samples=10, seed=4, d=8)
    assert a.to_dict() == b.to_dict()


def _unit_witness():
    return WitnessSequence.from_lists([[[1.0]]], [[[1.0]]], [1.0])


def test_jp_identity_for_the_scalar_form():
    report = mc_jp(scalar_form(), _unit_witness(), d=16, samples=200, seed=5)
    assert report.exact_value == pytest.approx(1.0)
    assert report.identity_passed
    assert "WARN_JP_DIMENSION_BELOW_FORMULA" in report.warnings


def test_jp_rejects_weighted_witness():
    w = WitnessSequence.from_lists([[[0.5]]], [[[0.5]]], [2.0])
    with pytest.raises(PreconditionViolation):
        mc_jp(scalar_form(), w, d=4, samples=2)


def test_jp_rejects_infeasible_witness():
    w = WitnessSequence.from_lists([[[2.0]]], [[[1.0]]], [1.0])
    with pytest.raises(PreconditionViolation):
        mc_jp(scalar_form(), w, d=4, samples=2)


def test_sigmas_sets_the_pass_margin():
    report = MCReport(label="ht", samples=10, dim=4, mean=1.1, std_error=0.05, bound=1.0)
    assert report.passed
    assert not replace(report, sigmas=1.0).passed


def test_sigmas_reaches_the_reports():
    report = mc_ht([[[1.0]]], gamma=1.0, eps=1.0, samples=5, seed=6, d=4, sigmas=5.0)
    assert report.sigmas == 5.0
    assert report.to_dict()["sigmas"] == 5.0
    jp = mc_jp(scalar_form(), _unit_witness(), d=4, samples=5, seed=6, sigmas=2.0)
    assert jp.sigmas == 2.0
    assert jp.norm_product.sigmas == 2.0


def test_sigmas_must_be_positive():
    with pytest.raises(InvalidParameter):
        mc_ht([[[1.0]]], gamma=1.0, eps=1.0, samples=2, d=2, sigmas=0.0)


@pytest.mark.slow
def test_ht_at_the_formula_dimension():
    a = [matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)]
    report = mc_ht(a, gamma=1.0, eps=0.5, samples=200, seed=0)
    assert report.dim == 355
    assert report.bound == pytest.approx(6.0)
    assert report.mean <= 6.0 + 3.0 * report.std_error


@pytest.mark.slow
def test_jp_identity_for_a_random_form():
    rng = np.random.default_rng(21)
    u = random_form(rng, 2, 2)
    w = random_witness(rng, 2, 2, 2, log_t_scale=0.0, flavor="loose")
    report = mc_jp(u, w, d=64, eps=0.5, samples=500, seed=0)
    assert abs(report.mean_value - report.exact_value) <= 3.0 * report.value_std_error
