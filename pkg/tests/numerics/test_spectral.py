import logging

import numpy as np
import pytest

from backend.errors import DimensionMismatch, NonFiniteInput
from backend.numerics import (
    as_cmatrix,
    eigenvalues,
    op_norm,
    polar_maximizer,
    psd_defect,
    top_singular_pair,
    trace_norm,
)
from backend.seeding import rng_for


def test_op_norm_of_diagonal():
    assert op_norm(np.diag([3.0, -1.0, 0.5])) == pytest.approx(3.0)


def test_op_norm_of_empty_matrix_is_zero():
    assert op_norm(np.zeros((0, 0))) == 0.0


def test_trace_norm_of_diagonal():
    assert trace_norm(np.diag([3.0, -1.0, 0.5])) == pytest.approx(4.5)


def test_eigenvalues_ascending():
    assert np.allclose(eigenvalues(np.diag([2.0, -1.0])), [-1.0, 2.0])


def test_non_hermitian_input_is_symmetrized():
    h = np.array([[0.0, 2.0], [0.0, 0.0]])
    assert np.allclose(eigenvalues(h), [-1.0, 1.0])


def test_psd_defect():
    assert psd_defect(np.eye(2)) == 0.0
    assert psd_defect(np.diag([1.0, -0.25])) == pytest.approx(0.25)


def test_top_singular_pair_is_real_nonnegative():
    m = rng_for(0, 99).standard_normal((4, 4))
    s, u, v = top_singular_pair(m)
    assert np.vdot(u, m @ v) == pytest.approx(s)


def test_polar_maximizer_attains_trace_norm():
    rng = rng_for(0, 99, 1)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a = polar_maximizer(m)
    assert op_norm(a) == pytest.approx(1.0)
    assert np.trace(m @ a) == pytest.approx(trace_norm(m))


def test_polar_maximizer_of_zero_is_zero():
    assert np.all(polar_maximizer(np.zeros((2, 2))) == 0)


def test_polar_maximizer_rank_deficient():
    m = np.diag([2.0, 0.0])
    a = polar_maximizer(m)
    assert np.allclose(a, np.diag([1.0, 0.0]))


def test_as_cmatrix_rejects_vectors():
    with pytest.raises(DimensionMismatch):
        as_cmatrix(np.ones(3))


def test_as_cmatrix_rejects_nan():
    with pytest.raises(NonFiniteInput):
        as_cmatrix(np.array([[np.nan]]))


def test_op_norm_of_nilpotent():
    assert op_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2.0)


def test_op_norm_unitary_invariance():
    from backend.numerics import random_unitary

    rng = rng_for(0, 99, 2)
    a = rng.standard_normal((3, 3))
    u, v = random_unitary(rng, 3), random_unitary(rng, 3)
    assert op_norm(u @ a @ v) == pytest.approx(op_norm(a), rel=1e-12)


def test_polar_maximizer_flips_signs_on_diagonal():
    m = np.diag([2.0, -1.0])
    a = polar_maximizer(m)
    assert np.allclose(a, np.diag([1.0, -1.0]))
    assert np.trace(m @ a).real == pytest.approx(3.0)


def test_non_hermitian_input_logs_a_warning(caplog):
    h = np.array([[1.0, 2.0], [0.0, 1.0]])
    with caplog.at_level(logging.WARNING, logger="backend.numerics"):
        vals = eigenvalues(h)
    assert vals == pytest.approx([0.0, 2.0])
    assert any("non-Hermitian" in r.getMessage() for r in caplog.records)


def test_hermitian_input_logs_nothing(caplog):
    with caplog.at_level(logging.WARNING, logger="backend.numerics"):
        eigenvalues(np.diag([1.0, 2.0]))
    assert not caplog.records
