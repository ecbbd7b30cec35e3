"""
backend/numerics.py

Dense complex matrix kernels shared by every other module.

Matrices are plain 2-D numpy arrays (the CMatrix of the model); every
kernel is a pure function of its inputs. Spectral quantities come from
full LAPACK decompositions: dimensions here stay at desk scale, where an
exact dense factorization is cheaper than tuning an iterative method.

Tolerances live in this module as constants and every kernel that uses
one takes a per-call override.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from backend.errors import DimensionMismatch, NonFiniteInput

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]

# ============================================================
# Tolerances (defaults; see config_service.Tolerances)
# ============================================================

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
SUPPORT_TOL = 1e-14
SCHMIDT_ZERO_TOL = 1e-14
UNIT_NORM_TOL = 1e-12


# ============================================================
# Validation
# ============================================================

def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """
    Validate and return `a` as a 2-D finite numpy array.

    Real inputs stay real; everything else is promoted to complex128.
    """
    arr = np.asarray(a)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch("ERR_NOT_A_MATRIX", {"name": name, "shape": list(arr.shape)})
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.complex128)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("ERR_NON_FINITE", {"name": name})
    return arr


def require_square(a, name: str = "matrix") -> np.ndarray:
    arr = as_cmatrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch("ERR_NOT_SQUARE", {"name": name, "shape": list(arr.shape)})
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matrix_unit(n: int, i: int, j: int, m: int | None = None) -> np.ndarray:
    """E_ij in M_{n×m}, zero-based indices."""
    e = np.zeros((n, n if m is None else m), dtype=np.complex128)
    e[i, j] = 1.0
    return e


# ============================================================
# Products
# ============================================================

def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ((i,k),(j,l)) = a[i,j]·b[k,l]."""
    return np.kron(as_cmatrix(a, "a"), as_cmatrix(b, "b"))


def adjoint(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def hermitian_part(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """
    Return (H + H*)/2 for a square H.

    Inputs further than `tol` from Hermitian are still symmetrized, with
    a warning in the log.
    """
    h = require_square(h, "H")
    deviation = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if deviation > tol:
        logger.warning("symmetrizing non-Hermitian input (max deviation %.3e)", deviation)
    return (h + h.conj().T) / 2


# ============================================================
# Spectral quantities
# ============================================================

def singular_values(a) -> np.ndarray:
    """Singular values in nonincreasing order."""
    arr = as_cmatrix(a)
    if arr.size == 0:
        return np.zeros(0)
    return np.linalg.svd(arr, compute_uv=False)


def op_norm(a) -> float:
    """Largest singular value."""
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def trace_norm(a) -> float:
    """Sum of singular values."""
    return float(np.sum(singular_values(a)))


def eigenvalues(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian part of a square matrix."""
    return np.linalg.eigvalsh(hermitian_part(h, tol))


def min_eigenvalue(h, tol: float = HERMITIAN_TOL) -> float:
    return float(eigenvalues(h, tol)[0])


def psd_defect(h, tol: float = HERMITIAN_TOL) -> float:
    """How far H is from the PSD cone: max(0, -λ_min)."""
    return max(0.0, -min_eigenvalue(h, tol))


def top_eigvec(h) -> Tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector of a Hermitian matrix."""
    w, v = np.linalg.eigh(hermitian_part(h, tol=np.inf))
    return float(w[-1]), v[:, -1]


def top_singular_pair(m) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    (σ₁, u, v) with m v = σ₁ u and u, v unit vectors.

    ⟨u, m v⟩ = σ₁ is real and nonnegative.
    """
    u, s, vh = np.linalg.svd(as_cmatrix(m))
    return float(s[0]), u[:, 0], vh[0].conj()


def polar_maximizer(m, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    """
    Maximize |Tr(M a)| over ‖a‖ ≤ 1 in closed form.

    With M = U S V*, returns a = V P U* where P projects onto the
    singular values above `support_tol`·σ₁, so Tr(M a) = ‖M‖₁ exactly and
    a = 0 when M = 0.
    """
    arr = as_cmatrix(m, "M")
    u, s, vh = np.linalg.svd(arr, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((arr.shape[1], arr.shape[0]), dtype=np.complex128)
    keep = s > support_tol * s[0]
    return (vh[keep].conj().T) @ (u[:, keep].conj().T)


# ============================================================
# Block contractions (M_n ⊗ M_d legs)
# ============================================================

def split_legs(a, n: int) -> Tuple[np.ndarray, int]:
    """
    View an (n·d)×(n·d) matrix as the 4-index array A[k, α, l, β]
    with a = Σ a_kl ⊗ x_αβ ordering (M_n leg first, as in kron).
    """
    arr = require_square(a)
    size = arr.shape[0]
    if size % n:
        raise DimensionMismatch("ERR_LEG_SPLIT", {"size": size, "n": n})
    d = size // n
    return arr.reshape(n, d, n, d), d


def partial_matrix_elements(a, n: int, bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    """
    C[k, l, i, j] = ⟨bra_i, A_kl ket_j⟩ where A_kl is the d×d block of `a`
    at M_n position (k, l) and bra_i, ket_j are columns of the given
    bases. Equivalently C[:, :, i, j] = (I ⊗ bra_i*) a (I ⊗ ket_j).
    """
    a4, _ = split_legs(a, n)
    return np.einsum("ai,kalb,bj->klij", np.conj(bra), a4, ket, optimize=True)


# ============================================================
# Random helpers (test oracles and search initialization)
# ============================================================

def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """Complex Gaussian matrix with iid standard complex normal entries."""
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_contraction(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """Ginibre matrix scaled to unit operator norm."""
    g = ginibre(rng, rows, cols)
    return g / op_norm(g)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    q, r = np.linalg.qr(ginibre(rng, n))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases[None, :]
