import numpy as np
import pytest

from backend.errors import DimensionMismatch, NonFiniteInput
from backend.forms.tensor import (
    FormTensor,
    amplify,
    dense_pairing,
    evaluate,
    pair_with_states,
    random_form,
    reduced_form,
    scalar_form,
    trace_form,
)
from backend.numerics import ginibre, identity
from backend.states import embezzlement_state, max_entangled_state, random_state, state_pairing


def test_scalar_form_multiplies():
    assert evaluate(scalar_form(), [[2.0]], [[3j]]) == pytest.approx(6j)


def test_trace_form_is_trace_of_product():
    rng = np.random.default_rng(31)
    a, b = ginibre(rng, 3), ginibre(rng, 3)
    assert evaluate(trace_form(3), a, b) == pytest.approx(np.trace(a @ b))


def test_evaluate_is_linear():
    rng = np.random.default_rng(32)
    u = random_form(rng, 2, 3)
    a, b = ginibre(rng, 2), ginibre(rng, 3)
    assert u(2 * a, b) == pytest.approx(2 * u(a, b))


def test_operand_shapes_checked():
    with pytest.raises(DimensionMismatch):
        evaluate(trace_form(2), np.eye(2), np.eye(3))


def test_form_validation():
    with pytest.raises(DimensionMismatch):
        FormTensor(2, 2, np.zeros((2, 2, 2)))
    with pytest.raises(NonFiniteInput):
        FormTensor(1, 1, np.full((1, 1, 1, 1), np.nan))


def test_amplify_at_d1_is_evaluate():
    rng = np.random.default_rng(33)
    u = random_form(rng, 2, 2)
    a, b = ginibre(rng, 2), ginibre(rng, 2)
    assert amplify(u, a, b)[0, 0] == pytest.approx(evaluate(u, a, b))


def test_amplify_elementary_tensors():
    rng = np.random.default_rng(34)
    u = random_form(rng, 2, 2)
    a, b, x, y = (ginibre(rng, 2) for _ in range(4))
    got = amplify(u, np.kron(a, x), np.kron(b, y))
    assert np.allclose(got, evaluate(u, a, b) * np.kron(x, y))


def test_amplify_matches_basis_expansion():
    rng = np.random.default_rng(35)
    u = random_form(rng, 2, 2)
    A, B = ginibre(rng, 4), ginibre(rng, 4)
    expected = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        for l in range(2):
            a = np.zeros((2, 2))
            a[k, l] = 1.0
            x = A.reshape(2, 2, 2, 2)[k, :, l, :]
            for p in range(2):
                for q in range(2):
                    b = np.zeros((2, 2))
                    b[p, q] = 1.0
                    y = B.reshape(2, 2, 2, 2)[p, :, q, :]
                    expected += evaluate(u, a, b) * np.kron(x, y)
    assert np.allclose(amplify(u, A, B), expected)


def test_amplify_is_bilinear():
    rng = np.random.default_rng(36)
    u = random_form(rng, 2, 1)
    A, A2, B = ginibre(rng, 6), ginibre(rng, 6), ginibre(rng, 3)
    assert np.allclose(amplify(u, A + A2, B), amplify(u, A, B) + amplify(u, A2, B), atol=1e-12)


def test_amplify_rejects_mixed_dimensions():
    u = trace_form(2)
    with pytest.raises(DimensionMismatch):
        amplify(u, np.eye(4), np.eye(6))


def test_pairing_matches_dense_route():
    rng = np.random.default_rng(37)
    for n, m, d in [(1, 1, 1), (2, 1, 3), (2, 2, 4), (1, 3, 2)]:
        u = random_form(rng, n, m)
        A, B = ginibre(rng, n * d), ginibre(rng, m * d)
        omega, omega_p = random_state(rng, d), random_state(rng, d)
        fast = pair_with_states(u, A, B, omega, omega_p)
        slow = dense_pairing(u, A, B, omega.vector(), omega_p.vector())
        assert fast == pytest.approx(slow, abs=1e-10)


def test_tracial_pairing():
    rng = np.random.default_rng(38)
    u = random_form(rng, 2, 2)
    a, b, x, y = ginibre(rng, 2), ginibre(rng, 2), ginibre(rng, 3), ginibre(rng, 3)
    got = pair_with_states(u, np.kron(a, x), np.kron(b, y), max_entangled_state(3))
    assert got == pytest.approx(np.trace(x @ y.T) / 3 * evaluate(u, a, b))


def test_pairing_on_identities_with_trace_form():
    d = 5
    got = pair_with_states(trace_form(2), identity(2 * d), identity(2 * d), embezzlement_state(d))
    assert got == pytest.approx(2.0 * state_pairing(embezzlement_state(d), np.eye(d), np.eye(d)))


def test_reduced_form_evaluates_the_pairing():
    rng = np.random.default_rng(39)
    u = random_form(rng, 2, 1)
    omega, omega_p = random_state(rng, 2), random_state(rng, 2)
    A, B = ginibre(rng, 4), ginibre(rng, 2)
    red = reduced_form(u, omega, omega_p)
    assert (red.n, red.m) == (4, 2)
    assert evaluate(red, A, B) == pytest.approx(pair_with_states(u, A, B, omega, omega_p), abs=1e-10)


def test_form_dict_reloads():
    u = random_form(np.random.default_rng(40), 2, 1)
    assert np.array_equal(FormTensor.from_dict(u.to_dict()).coeffs, u.coeffs)
