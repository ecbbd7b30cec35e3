"""
backend/forms/eta.py

Row/column ratio search for the constant

    η(M_n)² = sup ‖Σ x_i x_i*‖ / ‖Σ x_i* x_i‖.

The supremum with rows and columns exchanged is the same number (pass
to adjoints), so one direction is searched. The matrix-unit witness
x_i = E_{1i} attains ratio n, hence η(M_n) ≥ √n; the search reports
whether random starts get there.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.errors import InvalidParameter, require_positive_int
from backend.numerics import ginibre, matrix_unit, op_norm, top_eigvec
from backend.seeding import STREAM_ETA_SEARCH, rng_for

logger = logging.getLogger(__name__)


def row_norm(xs: np.ndarray) -> float:
    return op_norm(np.einsum("iab,icb->ac", xs, xs.conj()))


def col_norm(xs: np.ndarray) -> float:
    return op_norm(np.einsum("iba,ibc->ac", xs.conj(), xs))


def rc_ratio(xs) -> float:
    """‖Σ x x*‖ / ‖Σ x* x‖."""
    xs = np.asarray(xs, dtype=np.complex128)
    if xs.ndim != 3 or xs.shape[0] == 0:
        raise InvalidParameter("ERR_WITNESS_EMPTY", {})
    denom = col_norm(xs)
    if denom == 0.0:
        raise InvalidParameter("ERR_ZERO_SEQUENCE", {})
    return row_norm(xs) / denom


def matrix_unit_witness(n: int) -> np.ndarray:
    """x_i = E_{1i}, i = 1..n: Σ x x* = n E_11, Σ x* x = I."""
    n = require_positive_int(n, "n")
    return np.stack([matrix_unit(n, 0, i) for i in range(n)])


@dataclass
class EtaSearchResult:
    n: int
    length: int
    best_ratio: float
    matrix_unit_ratio: float
    witness: np.ndarray
    restarts: int
    seed: int

    @property
    def search_lower_bound(self) -> float:
        return math.sqrt(self.best_ratio)

    @property
    def lower_bound(self) -> float:
        return math.sqrt(max(self.best_ratio, self.matrix_unit_ratio))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "length": self.length,
            "best_ratio": self.best_ratio,
            "search_lower_bound": self.search_lower_bound,
            "matrix_unit_ratio": self.matrix_unit_ratio,
            "lower_bound": self.lower_bound,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def _log_ratio_and_grad(xs: np.ndarray):
    a, v = top_eigvec(np.einsum("iab,icb->ac", xs, xs.conj()))
    b, w = top_eigvec(np.einsum("iba,ibc->ac", xs.conj(), xs))
    grad = (
        2.0 * np.einsum("a,c,icb->iab", v, v.conj(), xs) / a
        - 2.0 * np.einsum("iac,c,b->iab", xs, w, w.conj()) / b
    )
    return math.log(a) - math.log(b), grad


def _ascend(xs: np.ndarray, max_iter: int):
    value, grad = _log_ratio_and_grad(xs)
    step = 0.1
    for _ in range(max_iter):
        cand = xs + step * grad
        cand /= math.sqrt(col_norm(cand))
        cand_value, cand_grad = _log_ratio_and_grad(cand)
        if cand_value > value:
            xs, value, grad = cand, cand_value, cand_grad
            step *= 1.5
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return value, xs


def eta_witness_search(
    n: int,
    length: Optional[int] = None,
    restarts: int = 8,
    seed: int = 0,
    max_iter: int = 200,
) -> EtaSearchResult:
    """
    Maximize ‖Σ x x*‖ subject to ‖Σ x* x‖ = 1 from random starts
    (stream (ETA_SEARCH, r) of `seed`).
    """
    n = require_positive_int(n, "n")
    length = n if length is None else require_positive_int(length, "length")
    restarts = require_positive_int(restarts, "restarts")

    best_value, best_xs = -math.inf, None
    for r in range(restarts):
        rng = rng_for(seed, STREAM_ETA_SEARCH, r)
        xs = np.stack([ginibre(rng, n) for _ in range(length)])
        xs /= math.sqrt(col_norm(xs))
        value, xs = _ascend(xs, max_iter)
        logger.debug("eta search start %d: ratio %.12g", r, math.exp(value))
        if value > best_value:
            best_value, best_xs = value, xs

    return EtaSearchResult(
        n=n,
        length=length,
        best_ratio=rc_ratio(best_xs),
        matrix_unit_ratio=rc_ratio(matrix_unit_witness(n)),
        witness=best_xs,
        restarts=restarts,
        seed=int(seed),
    )
