"""
backend/forms/tensor.py

Bilinear forms u: M_n × M_m → C stored as a dense coefficient tensor

    u(a, b) = Σ U[k, l, p, q] · a[k, l] · b[p, q],

with their amplifications u_d : M_n⊗M_d × M_m⊗M_d → M_d⊗M_d and the
state pairings ⟨Ω, u_d(A, B) Ω′⟩. Elements of M_n ⊗ M_d are (n·d)×(n·d)
matrices with the M_n leg first, exactly as numpy.kron lays them out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.errors import DimensionMismatch, NonFiniteInput, require_positive_int
from backend.numerics import as_cmatrix, partial_matrix_elements, split_legs
from backend.schemas import FormTensorFile, decode_complex, encode_complex
from backend.states import SchmidtState


@dataclass(frozen=True)
class FormTensor:
    n: int
    m: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.n, self.n, self.m, self.m):
            raise DimensionMismatch(
                "ERR_FORM_SHAPE", {"n": self.n, "m": self.m, "shape": list(coeffs.shape)}
            )
        if not np.all(np.isfinite(coeffs)):
            raise NonFiniteInput("ERR_NON_FINITE", {"name": "coeffs"})
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, a, b) -> complex:
        return evaluate(self, a, b)

    def scaled(self, factor: complex) -> "FormTensor":
        return FormTensor(self.n, self.m, self.coeffs * factor)

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "coeffs": encode_complex(self.coeffs)}

    @classmethod
    def from_dict(cls, data: dict) -> "FormTensor":
        f = FormTensorFile.model_validate(data)
        return cls(f.n, f.m, decode_complex(f.coeffs))


# ============================================================
# Builtin forms
# ============================================================

def scalar_form() -> FormTensor:
    """u(x, y) = x·y on M_1 × M_1."""
    return FormTensor(1, 1, np.ones((1, 1, 1, 1)))


def trace_form(n: int) -> FormTensor:
    """u(a, b) = Tr(a b), i.e. U[k, l, p, q] = δ_kq δ_lp."""
    n = require_positive_int(n, "n")
    eye = np.eye(n)
    return FormTensor(n, n, np.einsum("kq,lp->klpq", eye, eye))


def random_form(rng: np.random.Generator, n: int, m: int) -> FormTensor:
    """Complex Gaussian coefficients, scaled so Σ|U|² = 1."""
    shape = (n, n, m, m)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return FormTensor(n, m, g / np.linalg.norm(g))


BUILTIN_FORMS = {
    "scalar": lambda n, m, rng: scalar_form(),
    "trace": lambda n, m, rng: trace_form(n),
    "random": lambda n, m, rng: random_form(rng, n, m),
}


# ============================================================
# Evaluation
# ============================================================

def _check(u: FormTensor, a, b):
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    if a.shape != (u.n, u.n) or b.shape != (u.m, u.m):
        raise DimensionMismatch(
            "ERR_FORM_OPERANDS",
            {"n": u.n, "m": u.m, "a": list(a.shape), "b": list(b.shape)},
        )
    return a, b


def evaluate(u: FormTensor, a, b) -> complex:
    a, b = _check(u, a, b)
    return complex(np.einsum("klpq,kl,pq->", u.coeffs, a, b))


def evaluate_many(u: FormTensor, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """u(x_i, y_i) for stacked (L, n, n) and (L, m, m) arrays."""
    return np.einsum("klpq,ikl,ipq->i", u.coeffs, xs, ys)


def amplify(u: FormTensor, A, B) -> np.ndarray:
    """
    u_d(A, B) = Σ_{i,j} u(a_i, b_j) x_i ⊗ y_j for A = Σ a_i ⊗ x_i,
    B = Σ b_j ⊗ y_j, returned as a d²×d² matrix.
    """
    A4, d = split_legs(A, u.n)
    B4, d_b = split_legs(B, u.m)
    if d != d_b:
        raise DimensionMismatch("ERR_AMPLIFY_DIMS", {"d_a": d, "d_b": d_b})
    out = np.einsum("klpq,kalb,pcqd->acbd", u.coeffs, A4, B4, optimize=True)
    return out.reshape(d * d, d * d)


def pair_with_states(
    u: FormTensor,
    A,
    B,
    omega: SchmidtState,
    omega_p: Optional[SchmidtState] = None,
) -> complex:
    """
    ⟨Ω, u_d(A, B) Ω′⟩ through the Schmidt forms, never building u_d:

        Σ_{i,j} λ_i μ_j Σ U[k,l,p,q] ⟨e_i, A_kl g_j⟩ ⟨f_i, B_pq h_j⟩

    with Ω = Σ λ_i e_i ⊗ f_i and Ω′ = Σ μ_j g_j ⊗ h_j.
    """
    omega_p = omega if omega_p is None else omega_p
    _, d = split_legs(A, u.n)
    _, d_b = split_legs(B, u.m)
    if not d == d_b == omega.dim == omega_p.dim:
        raise DimensionMismatch(
            "ERR_PAIRING_DIMS",
            {"d_a": d, "d_b": d_b, "omega": omega.dim, "omega_p": omega_p.dim},
        )
    e, f = omega.bases()
    g, h = omega_p.bases()
    cx = partial_matrix_elements(A, u.n, e, g)
    cy = partial_matrix_elements(B, u.m, f, h)
    return complex(
        np.einsum(
            "i,j,klpq,klij,pqij->",
            omega.coeffs, omega_p.coeffs, u.coeffs, cx, cy,
            optimize=True,
        )
    )


def dense_pairing(u: FormTensor, A, B, omega_vec, omega_p_vec=None) -> complex:
    """⟨Ω, u_d(A, B) Ω′⟩ by materializing u_d; for small d cross-checks."""
    omega_p_vec = omega_vec if omega_p_vec is None else omega_p_vec
    K = amplify(u, A, B)
    return complex(np.vdot(omega_vec, K @ omega_p_vec))


def reduced_form(
    u: FormTensor,
    omega: SchmidtState,
    omega_p: Optional[SchmidtState] = None,
) -> FormTensor:
    """
    u_d^Ω as an explicit form on M_{nd} × M_{md}:

        U′[(k,α),(l,β),(p,γ),(q,δ)] = U[k,l,p,q] · conj(W[α,γ]) · W′[β,δ]

    where W, W′ are the coefficient matrices of Ω, Ω′.
    """
    omega_p = omega if omega_p is None else omega_p
    w = omega.coefficient_matrix()
    w_p = omega_p.coefficient_matrix()
    d = omega.dim
    big = np.einsum("klpq,ac,bd->kalbpcqd", u.coeffs, w.conj(), w_p, optimize=True)
    return FormTensor(u.n * d, u.m * d, big.reshape(u.n * d, u.n * d, u.m * d, u.m * d))
