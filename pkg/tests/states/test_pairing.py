import numpy as np
import pytest

from backend.numerics import matrix_unit
from backend.states import (
    embezzlement_state,
    max_entangled_state,
    random_state,
    state_form_value,
    state_pairing,
)
from backend.seeding import rng_for


def test_identity_pairing_is_one():
    assert state_form_value(embezzlement_state(6), np.eye(6), np.eye(6)) == pytest.approx(1.0)


def test_psi_gives_normalized_trace():
    rng = rng_for(1, 2)
    a = rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3))
    assert state_form_value(max_entangled_state(3), a, b) == pytest.approx(np.trace(a @ b.T) / 3)


def test_phi_on_diagonal_units():
    phi = embezzlement_state(4)
    c = phi.coeffs
    assert state_form_value(phi, matrix_unit(4, 1, 1), matrix_unit(4, 1, 1)) == pytest.approx(c[1] ** 2)
    assert state_form_value(phi, matrix_unit(4, 1, 1), matrix_unit(4, 2, 2)) == 0


def test_pairing_matches_dense_kron():
    rng = rng_for(1, 3)
    s, s_p = random_state(rng, 3), random_state(rng, 3)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    dense = np.vdot(s.vector(), np.kron(a, b) @ s_p.vector())
    assert state_pairing(s, a, b, s_p) == pytest.approx(dense)
