"""
backend/randmat.py

Monte Carlo checks for Gaussian random matrix estimates.

  mc_ht   E‖Σ a_j ⊗ G_j‖² ≤ (1+ε)(√γ + 1)² at d = ⌈32 ε⁻² ln(4n/ε)⌉
  mc_jp   for x = Σ x_i ⊗ G_i, y = Σ y_i ⊗ conj(G_i):
            E ⟨Ψ_d, u_d(x, y) Ψ_d⟩ = Σ u(x_i, y_i)
            E ‖x‖‖y‖ ≤ 4(1 + ε/2)         at d = ⌈128 ε⁻² ln(8n/ε)⌉

G_j are d×d with iid entries (g + i·h)/√2, g and h real normal with
variance 1/d. Sample s draws its family from seed stream
(FAMILY, <check stream>, s), so results do not depend on sample order.
All checks pass at `sigmas` standard errors (3 unless overridden): they
confirm an expectation at statistical confidence, never a hard
inequality on a random quantity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from backend.errors import (
    DimensionMismatch,
    InvalidParameter,
    PreconditionViolation,
    require_positive,
    require_positive_int,
)
from backend.forms.tensor import FormTensor, pair_with_states
from backend.lifting import WitnessSequence, check_constraint
from backend.numerics import as_cmatrix, op_norm
from backend.progress import maybe_progress
from backend.schemas import encode_complex
from backend.seeding import STREAM_FAMILY, STREAM_MC_HT, STREAM_MC_JP, rng_for
from backend.states import max_entangled_state

logger = logging.getLogger(__name__)

SIGMAS = 3.0
PRECONDITION_TOL = 1e-10
JP_PRECONDITION_TOL = 1e-8


# ============================================================
# Gaussian families
# ============================================================

@dataclass
class GaussianFamily:
    count: int
    dim: int
    seed: int
    matrices: np.ndarray
    path: tuple = ()

    def __len__(self) -> int:
        return self.count


def sample_family(r: int, d: int, seed: int, path: Sequence[int] = ()) -> GaussianFamily:
    r = require_positive_int(r, "r")
    d = require_positive_int(d, "d")
    rng = rng_for(seed, STREAM_FAMILY, *path)
    scale = 1.0 / math.sqrt(2.0 * d)
    g = rng.standard_normal((r, d, d))
    h = rng.standard_normal((r, d, d))
    return GaussianFamily(count=r, dim=d, seed=int(seed), matrices=(g + 1j * h) * scale, path=tuple(path))


def s_matrix(a_list, fam: GaussianFamily) -> np.ndarray:
    """S = Σ_j a_j ⊗ G_j."""
    a = np.stack([as_cmatrix(x, "a") for x in a_list]) if len(a_list) else np.zeros((0, 1, 1))
    if a.shape[0] != fam.count:
        raise DimensionMismatch("ERR_FAMILY_LENGTH", {"a_list": int(a.shape[0]), "family": fam.count})
    n, d = a.shape[1], fam.dim
    s = np.einsum("jkl,jab->kalb", a, fam.matrices)
    return s.reshape(n * d, n * d)


def ht_dimension(n: int, eps: float) -> int:
    n = require_positive_int(n, "n")
    eps = _check_eps(eps)
    return math.ceil(32.0 / eps**2 * math.log(4.0 * n / eps))


def jp_dimension(n: int, eps: float) -> int:
    n = require_positive_int(n, "n")
    eps = _check_eps(eps)
    return math.ceil(128.0 / eps**2 * math.log(8.0 * n / eps))


def _check_eps(eps: float) -> float:
    eps = require_positive(eps, "eps")
    if eps > 1.0:
        raise InvalidParameter("ERR_EPS_RANGE", {"eps": eps})
    return eps


# ============================================================
# Reports
# ============================================================

@dataclass
class MCReport:
    label: str
    samples: int
    dim: int
    mean: float
    std_error: float
    bound: float
    sigmas: float = SIGMAS

    @property
    def passed(self) -> bool:
        return self.mean <= self.bound + self.sigmas * self.std_error

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "samples": self.samples,
            "d": self.dim,
            "mean": self.mean,
            "std_error": self.std_error,
            "bound": self.bound,
            "sigmas": self.sigmas,
            "pass": self.passed,
        }


def _mean_and_se(values: np.ndarray):
    """Mean and standard error; complex values use the total variance."""
    n = values.size
    mean = values.mean()
    if n < 2:
        return mean, math.inf
    var = np.sum(np.abs(values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


@dataclass
class JPReport:
    d: int
    samples: int
    exact_value: complex
    mean_value: complex
    value_std_error: float
    norm_product: MCReport
    gram_mean: np.ndarray
    gram_std_error: np.ndarray
    sigmas: float = SIGMAS
    warnings: List[str] = field(default_factory=list)

    @property
    def identity_passed(self) -> bool:
        return abs(self.mean_value - self.exact_value) <= self.sigmas * self.value_std_error

    @property
    def gram_passed(self) -> bool:
        target = np.eye(self.gram_mean.shape[0])
        return bool(np.all(np.abs(self.gram_mean - target) <= self.sigmas * self.gram_std_error))

    @property
    def passed(self) -> bool:
        return self.identity_passed and self.norm_product.passed and self.gram_passed

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "samples": self.samples,
            "exact_value": encode_complex(self.exact_value),
            "mean_value": encode_complex(self.mean_value),
            "value_std_error": self.value_std_error,
            "identity_pass": self.identity_passed,
            "norm_product": self.norm_product.to_dict(),
            "gram_mean": encode_complex(self.gram_mean),
            "gram_std_error": self.gram_std_error.tolist(),
            "gram_pass": self.gram_passed,
            "sigmas": self.sigmas,
            "pass": self.passed,
            "warnings": list(self.warnings),
        }


# ============================================================
# Checks
# ============================================================

def gram_means(fam: GaussianFamily) -> np.ndarray:
    """d^{-1} Tr(G_i G_j*) for one family."""
    g = fam.matrices
    return np.einsum("iab,jab->ij", g, g.conj()) / fam.dim


def mc_ht(
    a_list,
    gamma: float,
    eps: float,
    samples: int = 200,
    seed: int = 0,
    d: Optional[int] = None,
    progress: bool = False,
    sigmas: float = SIGMAS,
) -> MCReport:
    a = np.stack([as_cmatrix(x, "a") for x in a_list])
    n = a.shape[1]
    gamma = require_positive(gamma, "gamma")
    if gamma > 1.0:
        raise InvalidParameter("ERR_GAMMA_RANGE", {"gamma": gamma})
    eps = _check_eps(eps)
    samples = require_positive_int(samples, "samples")
    sigmas = require_positive(sigmas, "sigmas")

    col = op_norm(np.einsum("jba,jbc->ac", a.conj(), a))
    row = op_norm(np.einsum("jab,jcb->ac", a, a.conj()))
    if col > gamma + PRECONDITION_TOL or row > 1.0 + PRECONDITION_TOL:
        raise PreconditionViolation(
            "ERR_HT_PRECONDITION", {"col_norm": col, "row_norm": row, "gamma": gamma}
        )

    d = ht_dimension(n, eps) if d is None else require_positive_int(d, "d")
    values = np.empty(samples)
    for s in maybe_progress(range(samples), desc="mc-ht", enable=progress):
        fam = sample_family(a.shape[0], d, seed, path=(STREAM_MC_HT, s))
        values[s] = op_norm(s_matrix(a, fam)) ** 2

    mean, se = _mean_and_se(values)
    report = MCReport(
        label="ht",
        samples=samples,
        dim=d,
        mean=float(mean),
        std_error=float(se),
        bound=(1.0 + eps) * (math.sqrt(gamma) + 1.0) ** 2,
        sigmas=sigmas,
    )
    logger.info("mc_ht d=%d mean=%.6g se=%.3g bound=%.6g", d, report.mean, report.std_error, report.bound)
    return report


def mc_jp(
    u: FormTensor,
    w: WitnessSequence,
    d: Optional[int] = None,
    eps: float = 1.0,
    samples: int = 500,
    seed: int = 0,
    progress: bool = False,
    sigmas: float = SIGMAS,
) -> JPReport:
    """
    Draw one family per sample, form x = Σ x_i ⊗ G_i and
    y = Σ y_i ⊗ conj(G_i), record ⟨Ψ_d, u_d(x, y) Ψ_d⟩ and ‖x‖‖y‖.
    """
    samples = require_positive_int(samples, "samples")
    sigmas = require_positive(sigmas, "sigmas")
    eps = _check_eps(eps)
    if (u.n, u.m) != (w.n, w.m):
        raise DimensionMismatch("ERR_FORM_WITNESS_DIMS", {"form": [u.n, u.m], "witness": [w.n, w.m]})
    if not len(w):
        raise InvalidParameter("ERR_WITNESS_EMPTY", {})
    if np.max(np.abs(w.ts - 1.0)) > JP_PRECONDITION_TOL:
        raise PreconditionViolation("ERR_JP_WEIGHTS", {"max_deviation": float(np.max(np.abs(w.ts - 1.0)))})
    constraint = check_constraint(w, "loose")
    if constraint.violation > JP_PRECONDITION_TOL:
        raise PreconditionViolation("ERR_JP_PRECONDITION", constraint.to_dict())

    d = jp_dimension(max(u.n, u.m), eps) if d is None else require_positive_int(d, "d")
    psi = max_entangled_state(d)
    r = len(w)

    values = np.empty(samples, dtype=np.complex128)
    products = np.empty(samples)
    grams = np.empty((samples, r, r), dtype=np.complex128)
    for s in maybe_progress(range(samples), desc="mc-jp", enable=progress):
        fam = sample_family(r, d, seed, path=(STREAM_MC_JP, s))
        x = s_matrix(w.xs, fam)
        y = np.einsum("jkl,jab->kalb", w.ys, fam.matrices.conj()).reshape(u.m * d, u.m * d)
        values[s] = pair_with_states(u, x, y, psi)
        products[s] = op_norm(x) * op_norm(y)
        grams[s] = gram_means(fam)

    mean_value, value_se = _mean_and_se(values)
    mean_product, product_se = _mean_and_se(products)
    gram_mean = grams.mean(axis=0)
    gram_se = np.sqrt(np.sum(np.abs(grams - gram_mean) ** 2, axis=0) / max(samples - 1, 1) / samples)

    report = JPReport(
        d=d,
        samples=samples,
        exact_value=w.value(u),
        mean_value=complex(mean_value),
        value_std_error=float(value_se),
        norm_product=MCReport(
            label="jp-norm",
            samples=samples,
            dim=d,
            mean=float(mean_product),
            std_error=float(product_se),
            bound=4.0 * (1.0 + eps / 2.0),
            sigmas=sigmas,
        ),
        gram_mean=gram_mean,
        gram_std_error=gram_se,
        sigmas=sigmas,
    )
    if d < jp_dimension(max(u.n, u.m), eps):
        report.warnings.append("WARN_JP_DIMENSION_BELOW_FORMULA")
    logger.info(
        "mc_jp d=%d |mean-exact|=%.3g se=%.3g norm mean=%.6g",
        d, abs(report.mean_value - report.exact_value), report.value_std_error, report.norm_product.mean,
    )
    return report
