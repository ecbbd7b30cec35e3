"""
backend/states.py

Bipartite pure states in Schmidt form.

A state s = Σ_k c_k l_k ⊗ r_k in C^d ⊗ C^d is stored as its Schmidt
coefficients c and (optionally) the bases L = [l_k], R = [r_k]; the
canonical basis is implied when a basis is None. Dense d² vectors are
only produced on request for small d, so fidelity and pairing
computations scale to d ~ 10^6.

Houses the embezzlement state Φ_d (coefficients ∝ i^{-1/2}), the
maximally entangled state Ψ_d, their bilinear pairing
⟨s, (a ⊗ b) s′⟩ and the sorting embezzlement protocol.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from backend.errors import DimensionMismatch, InvalidParameter, require_positive_int
from backend.numerics import UNIT_NORM_TOL, as_cmatrix
from backend.schemas import SchmidtStateFile, decode_complex, encode_complex

logger = logging.getLogger(__name__)

DENSE_LIMIT = 64


# ============================================================
# SchmidtState
# ============================================================

@dataclass(frozen=True)
class SchmidtState:
    dim: int
    coeffs: np.ndarray
    left_basis: Optional[np.ndarray] = None
    right_basis: Optional[np.ndarray] = None
    tol: float = field(default=UNIT_NORM_TOL, repr=False, compare=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        object.__setattr__(self, "coeffs", coeffs)

        if coeffs.shape != (self.dim,):
            raise DimensionMismatch(
                "ERR_SCHMIDT_LENGTH", {"dim": self.dim, "length": int(coeffs.size)}
            )
        if np.any(coeffs < 0) or not np.all(np.isfinite(coeffs)):
            raise InvalidParameter("ERR_SCHMIDT_COEFFS", {"dim": self.dim})

        norm = float(np.sqrt(np.sum(coeffs**2)))
        if abs(norm - 1.0) > self.tol:
            raise InvalidParameter("ERR_NOT_UNIT", {"name": "state", "norm": norm})

        for name in ("left_basis", "right_basis"):
            basis = getattr(self, name)
            if basis is None:
                continue
            basis = as_cmatrix(basis, name).astype(np.complex128)
            if basis.shape != (self.dim, self.dim):
                raise DimensionMismatch(
                    "ERR_BASIS_SHAPE", {"name": name, "shape": list(basis.shape)}
                )
            object.__setattr__(self, name, basis)

    # ---- views ----

    @property
    def is_canonical(self) -> bool:
        return self.left_basis is None and self.right_basis is None

    def bases(self):
        eye = np.eye(self.dim, dtype=np.complex128)
        left = eye if self.left_basis is None else self.left_basis
        right = eye if self.right_basis is None else self.right_basis
        return left, right

    def coefficient_matrix(self) -> np.ndarray:
        """C with vec(s) = C.reshape(-1): C = L diag(c) Rᵀ."""
        left, right = self.bases()
        return (left * self.coeffs[None, :]) @ right.T

    def vector(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        if self.dim > limit:
            raise InvalidParameter("ERR_DENSE_LIMIT", {"dim": self.dim, "limit": limit})
        return self.coefficient_matrix().reshape(-1)

    # ---- JSON ----

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "coeffs": self.coeffs.tolist()}
        if self.left_basis is not None:
            out["left_basis"] = encode_complex(self.left_basis)
        if self.right_basis is not None:
            out["right_basis"] = encode_complex(self.right_basis)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SchmidtState":
        f = SchmidtStateFile.model_validate(data)
        return cls(
            dim=f.dim,
            coeffs=np.asarray(f.coeffs),
            left_basis=None if f.left_basis is None else decode_complex(f.left_basis),
            right_basis=None if f.right_basis is None else decode_complex(f.right_basis),
        )


# ============================================================
# Constructors
# ============================================================

def normalization_constant(d: int) -> float:
    """Z_d = Σ_{i=1}^d 1/i by direct summation."""
    d = require_positive_int(d, "d")
    return float(np.sum(1.0 / np.arange(1, d + 1, dtype=np.float64)))


def embezzlement_coeffs(d: int) -> np.ndarray:
    d = require_positive_int(d, "d")
    c = 1.0 / np.sqrt(np.arange(1, d + 1, dtype=np.float64))
    return c / np.sqrt(normalization_constant(d))


def embezzlement_state(d: int) -> SchmidtState:
    """Φ_d = Z_d^{-1/2} Σ_i i^{-1/2} e_i ⊗ e_i."""
    d = require_positive_int(d, "d")
    return SchmidtState(dim=d, coeffs=embezzlement_coeffs(d))


def max_entangled_state(d: int) -> SchmidtState:
    """Ψ_d = d^{-1/2} Σ_i e_i ⊗ e_i."""
    d = require_positive_int(d, "d")
    return SchmidtState(dim=d, coeffs=np.full(d, 1.0 / np.sqrt(d)))


def product_state(d: int) -> SchmidtState:
    """e_1 ⊗ e_1 in C^d ⊗ C^d."""
    d = require_positive_int(d, "d")
    c = np.zeros(d)
    c[0] = 1.0
    return SchmidtState(dim=d, coeffs=c)


def schmidt_decompose(vector, d: Optional[int] = None) -> SchmidtState:
    """
    Schmidt form of a unit vector in C^d ⊗ C^d (row-major (α, γ) index).

    Coefficients come out nonincreasing; the vector is renormalized so
    round-off in the caller does not trip the unit-norm invariant.
    """
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionMismatch("ERR_NOT_BIPARTITE", {"size": int(v.size), "dim": d})
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvalidParameter("ERR_NOT_UNIT", {"name": "state", "norm": 0.0})
    if abs(norm - 1.0) > 1e-8:
        raise InvalidParameter("ERR_NOT_UNIT", {"name": "state", "norm": float(norm)})
    u, s, vh = np.linalg.svd((v / norm).reshape(d, d))
    s = s / np.linalg.norm(s)
    return SchmidtState(dim=d, coeffs=s, left_basis=u, right_basis=vh.T)


def random_state(rng: np.random.Generator, d: int) -> SchmidtState:
    g = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
    return schmidt_decompose(g / np.linalg.norm(g), d)


# ============================================================
# Pairings
# ============================================================

def _check_operand(x, d: int, name: str) -> np.ndarray:
    x = as_cmatrix(x, name)
    if x.shape != (d, d):
        raise DimensionMismatch("ERR_STATE_OPERAND", {"name": name, "shape": list(x.shape), "dim": d})
    return x


def _sandwich(x: np.ndarray, bra: Optional[np.ndarray], ket: Optional[np.ndarray]) -> np.ndarray:
    """bra* x ket, skipping canonical (None) bases."""
    if bra is not None:
        x = bra.conj().T @ x
    if ket is not None:
        x = x @ ket
    return x


def state_pairing(s: SchmidtState, a, b, s_p: Optional[SchmidtState] = None) -> complex:
    """
    ⟨s, (a ⊗ b) s′⟩ without forming the d²×d² Kronecker product:

        Σ_{k,l} c_k c′_l ⟨l_k, a l′_l⟩ ⟨r_k, b r′_l⟩.
    """
    s_p = s if s_p is None else s_p
    if s_p.dim != s.dim:
        raise DimensionMismatch("ERR_STATE_DIMS", {"left": s.dim, "right": s_p.dim})
    a = _check_operand(a, s.dim, "a")
    b = _check_operand(b, s.dim, "b")
    a_ = _sandwich(a, s.left_basis, s_p.left_basis)
    b_ = _sandwich(b, s.right_basis, s_p.right_basis)
    return complex(s.coeffs @ (a_ * b_) @ s_p.coeffs)


def state_form_value(s: SchmidtState, a, b) -> complex:
    """φ(a, b) = ⟨s, (a ⊗ b) s⟩."""
    return state_pairing(s, a, b, s)


def overlap(s: SchmidtState, s_p: SchmidtState) -> complex:
    """⟨s, s′⟩."""
    eye = np.eye(s.dim)
    return state_pairing(s, eye, eye, s_p)


# ============================================================
# Embezzlement (sorting protocol)
# ============================================================

@dataclass
class EmbezzleResult:
    resource_dim: int
    target_dim: int
    fidelity: float
    permutation: List[int]

    def to_dict(self) -> dict:
        return {
            "resource_dim": self.resource_dim,
            "target_dim": self.target_dim,
            "fidelity": self.fidelity,
            "permutation": self.permutation,
        }


def embezzle(resource_dim: int, target: SchmidtState) -> EmbezzleResult:
    """
    Distill `target` from Φ_D (D = resource_dim) by a local permutation.

    The initial state Φ_D ⊗ (e_1 ⊗ e_1) and the ideal final state
    Φ_D ⊗ target are both diagonal in product bases; a local permutation
    of basis vectors (applied identically on both sides) can align the
    nonincreasingly sorted coefficient lists. The fidelity is their
    overlap. `permutation[p]` is the product-basis index the permutation
    sends initial index p to (index p = i·target.dim + j).
    """
    resource_dim = require_positive_int(resource_dim, "resource_dim")
    phi = embezzlement_coeffs(resource_dim)

    pad = np.zeros(target.dim)
    pad[0] = 1.0
    initial = np.kron(phi, pad)
    final = np.kron(phi, target.coeffs)

    src_order = np.argsort(-initial, kind="stable")
    tgt_order = np.argsort(-final, kind="stable")
    fidelity = float(abs(np.dot(initial[src_order], final[tgt_order])))

    permutation = np.empty(initial.size, dtype=np.int64)
    permutation[src_order] = tgt_order

    logger.debug("embezzle D=%d target_dim=%d fidelity=%.12f", resource_dim, target.dim, fidelity)
    return EmbezzleResult(
        resource_dim=resource_dim,
        target_dim=target.dim,
        fidelity=min(1.0, fidelity),
        permutation=permutation.tolist(),
    )
