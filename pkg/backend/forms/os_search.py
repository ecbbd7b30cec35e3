"""
backend/forms/os_search.py

Lower bounds on OS(u) = sup |Σ u(x_i, y_i)| over witnesses satisfying
the weighted column/row constraint, by projected gradient ascent.

The objective log|f| − log h_x − log h_y is invariant under separate
rescaling of the x and y sides, where h_x, h_y are the side values
normalized so that a feasible witness has h ≤ 1:

    standard  h = √((a + b)/2)
    loose     h = (√a + √b)/2

with a, b the two square-sum norms of the side. After every accepted
step the witness is rescaled onto h_x = h_y = 1, so the objective equals
|Σ u(x_i, y_i)| of a feasible witness.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from backend.errors import InvalidParameter, require_positive, require_positive_int
from backend.forms.tensor import FormTensor, evaluate_many
from backend.lifting import (
    FLAVORS,
    ConstraintReport,
    WitnessSequence,
    check_constraint,
    rescale_to_feasible,
)
from backend.numerics import ginibre, top_eigvec
from backend.seeding import STREAM_OS_SEARCH, rng_for

logger = logging.getLogger(__name__)

MAX_ITER = 400
STEP_FLOOR = 1e-12
LOG_T_LIMIT = 30.0


@dataclass
class OSSearchResult:
    value: float
    witness: WitnessSequence
    constraint: ConstraintReport
    flavor: str
    fixed_t: Optional[float]
    restarts: int
    best_restart: int
    seed: int

    def to_dict(self, include_witness: bool = True) -> dict:
        out = {
            "value": self.value,
            "flavor": self.flavor,
            "fixed_t": self.fixed_t,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "seed": self.seed,
            "constraint": self.constraint.to_dict(),
        }
        if include_witness:
            out["witness"] = self.witness.to_dict()
        return out


# ============================================================
# Side value and gradients
# ============================================================

def _side(zs: np.ndarray, wp: np.ndarray, wq: np.ndarray, sp: float, sq: float, flavor: str):
    """
    For P = Σ wp_i z_i z_i*, Q = Σ wq_i z_i* z_i returns
    (log h, ∂log h/∂z_i, ∂log h/∂log t_i), where ∂ wp/∂log t = sp·wp and
    ∂ wq/∂log t = sq·wq.
    """
    P = np.einsum("i,iab,icb->ac", wp, zs, zs.conj())
    Q = np.einsum("i,iba,ibc->ac", wq, zs.conj(), zs)
    a, v = top_eigvec(P)
    b, w = top_eigvec(Q)
    a, b = max(a, 1e-300), max(b, 1e-300)

    # ∂a/∂z_i = 2 wp_i v v* z_i ; ∂b/∂z_i = 2 wq_i z_i w w*
    vvz = np.einsum("a,c,icb->iab", v, v.conj(), zs)
    zww = np.einsum("iac,c,b->iab", zs, w, w.conj())
    grad_a = 2.0 * wp[:, None, None] * vvz
    grad_b = 2.0 * wq[:, None, None] * zww
    da_dlogt = sp * wp * np.sum(np.abs(np.einsum("a,iab->ib", v.conj(), zs)) ** 2, axis=1)
    db_dlogt = sq * wq * np.sum(np.abs(np.einsum("iab,b->ia", zs, w)) ** 2, axis=1)

    if flavor == "standard":
        s = a + b
        log_h = 0.5 * math.log(s / 2.0)
        grad = (grad_a + grad_b) / (2.0 * s)
        dlogt = (da_dlogt + db_dlogt) / (2.0 * s)
    else:
        ra, rb = math.sqrt(a), math.sqrt(b)
        log_h = math.log((ra + rb) / 2.0)
        grad = (grad_a / (2.0 * ra) + grad_b / (2.0 * rb)) / (ra + rb)
        dlogt = (da_dlogt / (2.0 * ra) + db_dlogt / (2.0 * rb)) / (ra + rb)
    return log_h, grad, dlogt


def _objective(u: FormTensor, xs, ys, log_t, flavor: str, with_grad: bool = True):
    t2 = np.exp(2.0 * log_t)
    f = complex(np.sum(evaluate_many(u, xs, ys)))
    ones = np.ones_like(t2)
    hx, gx, tx = _side(xs, ones, t2, 0.0, 2.0, flavor)
    hy, gy, ty = _side(ys, 1.0 / t2, ones, -2.0, 0.0, flavor)
    if abs(f) == 0.0:
        return -math.inf, None
    value = math.log(abs(f)) - hx - hy
    if not with_grad:
        return value, None

    cx = np.einsum("klpq,ipq->ikl", u.coeffs, ys)
    cy = np.einsum("klpq,ikl->ipq", u.coeffs, xs)
    scale = f / abs(f) ** 2
    grad_x = scale * cx.conj() - gx
    grad_y = scale * cy.conj() - gy
    grad_t = -(tx + ty)
    return value, (grad_x, grad_y, grad_t)


def _normalize(xs, ys, log_t, flavor: str):
    w = rescale_to_feasible(WitnessSequence(xs, ys, np.exp(log_t)), flavor)
    return w.xs, w.ys


# ============================================================
# Search
# ============================================================

def _ascend(u, xs, ys, log_t, flavor, fixed_t, max_iter):
    xs, ys = _normalize(xs, ys, log_t, flavor)
    value, grads = _objective(u, xs, ys, log_t, flavor)
    if grads is None:
        return value, xs, ys, log_t

    step = 0.1
    for _ in range(max_iter):
        gx, gy, gt = grads
        cand_x = xs + step * gx
        cand_y = ys + step * gy
        cand_t = log_t if fixed_t is not None else np.clip(log_t + step * gt, -LOG_T_LIMIT, LOG_T_LIMIT)
        cand_x, cand_y = _normalize(cand_x, cand_y, cand_t, flavor)
        cand_value, cand_grads = _objective(u, cand_x, cand_y, cand_t, flavor)
        if cand_value > value:
            improvement = cand_value - value
            xs, ys, log_t, value, grads = cand_x, cand_y, cand_t, cand_value, cand_grads
            step *= 1.5
            if improvement < 1e-13:
                break
        else:
            step *= 0.5
            if step < STEP_FLOOR:
                break
    return value, xs, ys, log_t


def os_search(
    u: FormTensor,
    length: int,
    flavor: str = "standard",
    fixed_t: Optional[float] = None,
    restarts: int = 16,
    seed: int = 0,
    *,
    initial: Optional[WitnessSequence] = None,
    max_iter: int = MAX_ITER,
) -> OSSearchResult:
    """
    Best feasible witness of the given length found from `restarts`
    random starts (stream (OS_SEARCH, r) of `seed`), plus `initial` when
    given. `fixed_t` pins every weight.
    """
    if flavor not in FLAVORS:
        raise InvalidParameter("ERR_FLAVOR", {"flavor": flavor, "allowed": list(FLAVORS)})
    length = require_positive_int(length, "length")
    restarts = require_positive_int(restarts, "restarts")
    if fixed_t is not None:
        fixed_t = require_positive(fixed_t, "fixed_t")

    starts = []
    if initial is not None:
        log_t0 = np.log(initial.ts) if fixed_t is None else np.full(len(initial), math.log(fixed_t))
        starts.append((initial.xs.copy(), initial.ys.copy(), log_t0))
    for r in range(restarts):
        rng = rng_for(seed, STREAM_OS_SEARCH, r)
        xs = np.stack([ginibre(rng, u.n) for _ in range(length)])
        ys = np.stack([ginibre(rng, u.m) for _ in range(length)])
        if fixed_t is None:
            log_t = 0.5 * rng.standard_normal(length)
        else:
            log_t = np.full(length, math.log(fixed_t))
        starts.append((xs, ys, log_t))

    best = None
    for index, (xs, ys, log_t) in enumerate(starts):
        value, xs, ys, log_t = _ascend(u, xs, ys, log_t, flavor, fixed_t, max_iter)
        logger.debug("os_search start %d: log value %.12g", index, value)
        if best is None or value > best[0]:
            best = (value, index, xs, ys, log_t)

    _, index, xs, ys, log_t = best
    witness = rescale_to_feasible(WitnessSequence(xs, ys, np.exp(log_t)), flavor)
    constraint = check_constraint(witness, flavor)
    if constraint.violation > 1e-9:
        shrink = 1.0 / (1.0 + constraint.violation)
        witness = witness.scaled(shrink, shrink)
        constraint = check_constraint(witness, flavor)

    return OSSearchResult(
        value=abs(witness.value(u)),
        witness=witness,
        constraint=constraint,
        flavor=flavor,
        fixed_t=fixed_t,
        restarts=len(starts),
        best_restart=index,
        seed=int(seed),
    )
