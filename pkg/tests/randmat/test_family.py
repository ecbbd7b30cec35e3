import math

import numpy as np
import pytest

from backend.errors import DimensionMismatch, InvalidParameter
from backend.randmat import gram_means, ht_dimension, jp_dimension, s_matrix, sample_family


def test_same_seed_same_family():
    a = sample_family(3, 8, seed=4, path=(1, 2))
    b = sample_family(3, 8, seed=4, path=(1, 2))
    assert np.array_equal(a.matrices, b.matrices)


def test_paths_give_independent_families():
    a = sample_family(2, 8, seed=4, path=(0,))
    b = sample_family(2, 8, seed=4, path=(1,))
    assert not np.allclose(a.matrices, b.matrices)


def test_entry_moments():
    d = 32
    entries = sample_family(4, d, seed=7).matrices.reshape(-1)
    n = entries.size
    assert abs(entries.mean()) <= 5 * math.sqrt(1.0 / (d * n))
    assert abs(np.mean(np.abs(entries) ** 2) - 1.0 / d) <= 5 * (1.0 / d) / math.sqrt(n)


def test_single_scalar_coefficient():
    fam = sample_family(1, 5, seed=1)
    assert np.array_equal(s_matrix([[[1.0]]], fam), fam.matrices[0])


def test_zero_coefficients():
    fam = sample_family(2, 3, seed=1)
    assert np.count_nonzero(s_matrix([np.zeros((2, 2)), np.zeros((2, 2))], fam)) == 0


def test_kron_layout():
    fam = sample_family(2, 3, seed=2)
    a = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    s = s_matrix(a, fam)
    assert np.allclose(s, np.kron(a[0], fam.matrices[0]) + np.kron(a[1], fam.matrices[1]))


def test_length_mismatch():
    with pytest.raises(DimensionMismatch):
        s_matrix([np.eye(2)], sample_family(2, 3, seed=0))


def test_gram_means_of_one_family():
    fam = sample_family(2, 4, seed=3)
    g = gram_means(fam)
    assert g.shape == (2, 2)
    assert np.allclose(g, g.conj().T)


def test_dimension_formulas():
    assert ht_dimension(1, 1.0) == math.ceil(32 * math.log(4))
    assert jp_dimension(2, 1.0) == math.ceil(128 * math.log(16))
    assert ht_dimension(2, 0.5) > ht_dimension(2, 1.0)
    with pytest.raises(InvalidParameter):
        ht_dimension(1, 1.5)
