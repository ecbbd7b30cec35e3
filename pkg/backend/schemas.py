# backend/schemas.py

"""
On-disk JSON schemas.

Complex numbers are stored as [re, im] pairs; matrices as nested lists
of such pairs (row-major). The pydantic models validate shape and type
on load; conversion to numpy happens in the owning modules.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

ComplexPair = List[float]


# =========================
# Complex codec
# =========================

def encode_complex(arr) -> list:
    """numpy array (any rank) → nested lists with [re, im] leaves."""
    arr = np.asarray(arr, dtype=np.complex128)
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def decode_complex(data) -> np.ndarray:
    """Inverse of encode_complex."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.shape[-1:] != (2,):
        raise ValueError("complex data must end in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


# =========================
# States
# =========================

class SchmidtStateFile(BaseModel):
    dim: int = Field(..., ge=1)
    coeffs: List[float]
    left_basis: Optional[list] = None
    right_basis: Optional[list] = None

    @field_validator("coeffs")
    @classmethod
    def _nonnegative(cls, v):
        if any(c < 0 for c in v):
            raise ValueError("Schmidt coefficients must be nonnegative")
        return v


# =========================
# Forms and witnesses
# =========================

class FormTensorFile(BaseModel):
    """u(a, b) = Σ coeffs[k][l][p][q] · a[k,l] · b[p,q]."""

    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    coeffs: list


class WitnessFile(BaseModel):
    xs: list = Field(default_factory=list)
    ys: list = Field(default_factory=list)
    ts: List[float] = Field(default_factory=list)
    n: Optional[int] = None
    m: Optional[int] = None

    @field_validator("ts")
    @classmethod
    def _positive(cls, v):
        if any(t <= 0 for t in v):
            raise ValueError("witness weights t_i must be positive")
        return v
