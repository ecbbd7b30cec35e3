"""
backend/forms/seesaw.py

Lower bounds on ‖u_d‖ = sup |⟨Ω, u_d(A, B) Ω′⟩| over contractions A, B
and unit vectors Ω, Ω′ by block coordinate ascent:

  A-step   fix (B, Ω, Ω′); the value is Tr(M A) for an explicit M,
           maximized by the polar factor of M.
  B-step   symmetric.
  Ω-step   fix (A, B); the best (Ω, Ω′) is the top singular pair of
           the d²×d² matrix u_d(A, B).

Every step is an exact partial maximization, so the value never
decreases. With a frozen state (Ψ_d or Φ_d) the Ω-step is skipped and
u_d is never materialized.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from backend.errors import require_positive_int
from backend.forms.tensor import FormTensor, amplify, pair_with_states
from backend.numerics import polar_maximizer, random_contraction, split_legs, top_singular_pair
from backend.schemas import encode_complex
from backend.seeding import STREAM_SEESAW, rng_for
from backend.states import (
    SchmidtState,
    embezzlement_state,
    max_entangled_state,
    schmidt_decompose,
)

logger = logging.getLogger(__name__)

MAX_ITER = 500
REL_TOL = 1e-10


@dataclass
class NormEstimate:
    """A certified lower bound: `value` = |⟨Ω, u_d(a, b) Ω′⟩|."""

    value: float
    d: int
    a: np.ndarray
    b: np.ndarray
    omega: SchmidtState
    omega_p: SchmidtState
    restarts: int
    best_restart: int
    iterations: int
    converged: bool
    seed: int
    frozen: Optional[str] = None

    def reevaluate(self, u: FormTensor) -> float:
        return abs(pair_with_states(u, self.a, self.b, self.omega, self.omega_p))

    def to_dict(self, include_certificate: bool = True) -> dict:
        out = {
            "value": self.value,
            "d": self.d,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "iterations": self.iterations,
            "converged": self.converged,
            "seed": self.seed,
            "frozen": self.frozen,
        }
        if include_certificate:
            out["certificate"] = {
                "a": encode_complex(self.a),
                "b": encode_complex(self.b),
                "omega": self.omega.to_dict(),
                "omega_p": self.omega_p.to_dict(),
            }
        return out


def _pair(u4: np.ndarray, A4: np.ndarray, B4: np.ndarray, w: np.ndarray, w_p: np.ndarray) -> complex:
    return complex(
        np.einsum("klpq,kalb,pcqd,ac,bd->", u4, A4, B4, w.conj(), w_p, optimize=True)
    )


def _a_step(u: FormTensor, B4, w, w_p, d: int) -> np.ndarray:
    g = np.einsum("klpq,pcqd,ac,bd->kalb", u.coeffs, B4, w.conj(), w_p, optimize=True)
    return polar_maximizer(g.reshape(u.n * d, u.n * d).T)


def _b_step(u: FormTensor, A4, w, w_p, d: int) -> np.ndarray:
    g = np.einsum("klpq,kalb,ac,bd->pcqd", u.coeffs, A4, w.conj(), w_p, optimize=True)
    return polar_maximizer(g.reshape(u.m * d, u.m * d).T)


def _state_step(u: FormTensor, A, B, d: int) -> Tuple[float, np.ndarray, np.ndarray]:
    sigma, left, right = top_singular_pair(amplify(u, A, B))
    return sigma, left.reshape(d, d), right.reshape(d, d)


def _run(
    u: FormTensor,
    A: np.ndarray,
    B: np.ndarray,
    d: int,
    frozen: Optional[SchmidtState],
    max_iter: int,
    rel_tol: float,
):
    if frozen is not None:
        w = w_p = frozen.coefficient_matrix()
        value = abs(_pair(u.coeffs, split_legs(A, u.n)[0], split_legs(B, u.m)[0], w, w_p))
    else:
        value, w, w_p = _state_step(u, A, B, d)

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        B4 = split_legs(B, u.m)[0]
        A = _a_step(u, B4, w, w_p, d)
        A4 = split_legs(A, u.n)[0]
        B = _b_step(u, A4, w, w_p, d)
        if frozen is None:
            new_value, w, w_p = _state_step(u, A, B, d)
        else:
            new_value = abs(_pair(u.coeffs, A4, split_legs(B, u.m)[0], w, w_p))

        gain = new_value - value
        value = max(value, new_value)
        if gain <= rel_tol * max(value, 1e-300):
            converged = True
            break
    return value, A, B, w, w_p, iterations, converged


def norm_seesaw(
    u: FormTensor,
    d: int,
    restarts: int = 32,
    seed: int = 0,
    *,
    frozen_state: Optional[SchmidtState] = None,
    frozen_name: Optional[str] = None,
    initial: Iterable[Tuple[np.ndarray, np.ndarray]] = (),
    max_iter: int = MAX_ITER,
    rel_tol: float = REL_TOL,
) -> NormEstimate:
    """
    Best of `restarts` random starts (plus any explicit `initial` (A, B)
    pairs, tried first). Restart r draws from stream (SEESAW, r) of
    `seed`; ties keep the lowest restart index.
    """
    d = require_positive_int(d, "d")
    restarts = require_positive_int(restarts, "restarts")

    starts = [(np.asarray(a, np.complex128), np.asarray(b, np.complex128)) for a, b in initial]
    for r in range(restarts):
        rng = rng_for(seed, STREAM_SEESAW, r)
        starts.append((random_contraction(rng, u.n * d), random_contraction(rng, u.m * d)))

    best = None
    total_iterations = 0
    for index, (A0, B0) in enumerate(starts):
        run = _run(u, A0, B0, d, frozen_state, max_iter, rel_tol)
        total_iterations += run[5]
        if best is None or run[0] > best[1][0]:
            best = (index, run)
        logger.debug("seesaw start %d: %.12g (%d iters)", index, run[0], run[5])

    index, (value, A, B, w, w_p, iterations, converged) = best
    if frozen_state is not None:
        omega = omega_p = frozen_state
    else:
        omega = schmidt_decompose(w.reshape(-1), d)
        omega_p = schmidt_decompose(w_p.reshape(-1), d)

    if not converged:
        logger.warning("seesaw: best start %d hit max_iter=%d", index, max_iter)

    return NormEstimate(
        value=float(value),
        d=d,
        a=A,
        b=B,
        omega=omega,
        omega_p=omega_p,
        restarts=len(starts),
        best_restart=index,
        iterations=total_iterations,
        converged=converged,
        seed=int(seed),
        frozen=frozen_name,
    )


def tracial_norm_seesaw(u: FormTensor, d: int, restarts: int = 32, seed: int = 0, **kwargs) -> NormEstimate:
    """Lower bound on ‖u_d^Ψ‖ (Ψ_d fixed)."""
    return norm_seesaw(
        u, d, restarts, seed, frozen_state=max_entangled_state(d), frozen_name="psi", **kwargs
    )


def phi_norm_seesaw(u: FormTensor, d: int, restarts: int = 32, seed: int = 0, **kwargs) -> NormEstimate:
    """Lower bound on ‖u_d^Φ‖ (Φ_d fixed)."""
    return norm_seesaw(
        u, d, restarts, seed, frozen_state=embezzlement_state(d), frozen_name="phi", **kwargs
    )
