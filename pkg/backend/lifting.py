"""
backend/lifting.py

Witness sequences (x_i, y_i, t_i) and the line-matrix lift

    x̃_{i,r} = x_i ⊗ L^r(t_i),    ỹ_{i,r} = t_i^{-1} y_i ⊗ L^r(t_i),

which turns a feasible witness of the weighted column/row constraint
into a feasible witness with a single common weight, paired with the
embezzlement state Φ_d. Also hosts the large/small weight truncation
and the construction of a witness from an amplified pair (a, b, Ω, Ω′).

Lifted elements are kept structurally (source index, piece, weight)
rather than as dense (n·d)×(n·d) matrices; the four square-sum norms
of a lift are block diagonal and are computed without materializing it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from backend.errors import (
    DimensionMismatch,
    InvalidParameter,
    NonFiniteInput,
    PreconditionViolation,
    require_positive,
    require_positive_int,
)
from backend.forms.tensor import FormTensor, evaluate_many, pair_with_states
from backend.lines import line_family, line_value
from backend.numerics import (
    SCHMIDT_ZERO_TOL,
    as_cmatrix,
    matrix_unit,
    op_norm,
    partial_matrix_elements,
    split_legs,
)
from backend.schemas import WitnessFile, decode_complex, encode_complex
from backend.states import DENSE_LIMIT, SchmidtState, embezzlement_state, state_form_value

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-10
IDENTITY_RTOL = 1e-10
FLAVORS = ("standard", "loose")


# ============================================================
# WitnessSequence
# ============================================================

@dataclass(frozen=True)
class WitnessSequence:
    """
    Finite sequence (x_i, y_i, t_i) with x_i ∈ M_n, y_i ∈ M_m, t_i > 0.

    Stored as stacked arrays xs (L, n, n), ys (L, m, m), ts (L,). An
    empty sequence keeps its n and m.
    """

    xs: np.ndarray
    ys: np.ndarray
    ts: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.complex128)
        ys = np.asarray(self.ys, dtype=np.complex128)
        ts = np.asarray(self.ts, dtype=np.float64).reshape(-1)

        if xs.ndim != 3 or xs.shape[1] != xs.shape[2]:
            raise DimensionMismatch("ERR_WITNESS_XS", {"shape": list(xs.shape)})
        if ys.ndim != 3 or ys.shape[1] != ys.shape[2]:
            raise DimensionMismatch("ERR_WITNESS_YS", {"shape": list(ys.shape)})
        if not xs.shape[0] == ys.shape[0] == ts.shape[0]:
            raise DimensionMismatch(
                "ERR_WITNESS_LENGTHS",
                {"xs": xs.shape[0], "ys": ys.shape[0], "ts": ts.shape[0]},
            )
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys)) and np.all(np.isfinite(ts))):
            raise NonFiniteInput("ERR_NON_FINITE", {"name": "witness"})
        if np.any(ts <= 0):
            raise InvalidParameter("ERR_WITNESS_WEIGHTS", {"min_t": float(ts.min())})

        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "ts", ts)

    @classmethod
    def from_lists(cls, xs, ys, ts, n: Optional[int] = None, m: Optional[int] = None) -> "WitnessSequence":
        xs = [as_cmatrix(x, "x") for x in xs]
        ys = [as_cmatrix(y, "y") for y in ys]
        shapes_x = {x.shape for x in xs}
        shapes_y = {y.shape for y in ys}
        if len(shapes_x) > 1 or len(shapes_y) > 1:
            raise DimensionMismatch(
                "ERR_WITNESS_SHAPES",
                {"xs": sorted(map(list, shapes_x)), "ys": sorted(map(list, shapes_y))},
            )
        n = xs[0].shape[0] if xs else n
        m = ys[0].shape[0] if ys else m
        if n is None or m is None:
            raise InvalidParameter("ERR_WITNESS_EMPTY_DIMS", {})
        xs_arr = np.stack(xs) if xs else np.zeros((0, n, n), dtype=np.complex128)
        ys_arr = np.stack(ys) if ys else np.zeros((0, m, m), dtype=np.complex128)
        return cls(xs_arr, ys_arr, np.asarray(ts, dtype=np.float64))

    @classmethod
    def empty(cls, n: int, m: int) -> "WitnessSequence":
        return cls(np.zeros((0, n, n)), np.zeros((0, m, m)), np.zeros(0))

    def __len__(self) -> int:
        return int(self.ts.shape[0])

    @property
    def n(self) -> int:
        return int(self.xs.shape[1])

    @property
    def m(self) -> int:
        return int(self.ys.shape[1])

    @property
    def max_weight(self) -> float:
        """max_i max(t_i, 1/t_i); 1 for an empty sequence."""
        if not len(self):
            return 1.0
        return float(np.max(np.maximum(self.ts, 1.0 / self.ts)))

    def subset(self, idx) -> "WitnessSequence":
        idx = np.asarray(idx, dtype=np.int64)
        return WitnessSequence(self.xs[idx], self.ys[idx], self.ts[idx])

    def scaled(self, x_factor: complex = 1.0, y_factor: complex = 1.0) -> "WitnessSequence":
        return WitnessSequence(self.xs * x_factor, self.ys * y_factor, self.ts)

    def with_weights(self, ts) -> "WitnessSequence":
        return WitnessSequence(self.xs, self.ys, np.broadcast_to(np.asarray(ts, float), self.ts.shape))

    def values(self, u: FormTensor) -> np.ndarray:
        """u(x_i, y_i) per element."""
        _check_form(u, self)
        return evaluate_many(u, self.xs, self.ys)

    def value(self, u: FormTensor) -> complex:
        return complex(np.sum(self.values(u)))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "xs": encode_complex(self.xs),
            "ys": encode_complex(self.ys),
            "ts": self.ts.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WitnessSequence":
        f = WitnessFile.model_validate(data)
        xs = [decode_complex(x) for x in f.xs]
        ys = [decode_complex(y) for y in f.ys]
        return cls.from_lists(xs, ys, f.ts, n=f.n, m=f.m)


def _check_form(u: FormTensor, w: WitnessSequence):
    if (u.n, u.m) != (w.n, w.m):
        raise DimensionMismatch(
            "ERR_FORM_WITNESS_DIMS", {"form": [u.n, u.m], "witness": [w.n, w.m]}
        )


# ============================================================
# Constraint
# ============================================================

@dataclass
class ConstraintReport:
    flavor: str
    x_row: float
    x_col: float
    y_row: float
    y_col: float
    x_value: float
    y_value: float
    bound: float = 2.0

    @property
    def value(self) -> float:
        return max(self.x_value, self.y_value)

    @property
    def violation(self) -> float:
        return max(0.0, self.value - self.bound)

    def feasible(self, tol: float = FEASIBILITY_TOL) -> bool:
        return self.violation <= tol

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "x_row": self.x_row,
            "x_col": self.x_col,
            "y_row": self.y_row,
            "y_col": self.y_col,
            "x_value": self.x_value,
            "y_value": self.y_value,
            "bound": self.bound,
            "violation": self.violation,
        }


def square_sums(w: WitnessSequence) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(Σ x x*, Σ t² x* x, Σ t^{-2} y y*, Σ y* y)."""
    t2 = w.ts**2
    xs, ys = w.xs, w.ys
    x_row = np.einsum("iab,icb->ac", xs, xs.conj())
    x_col = np.einsum("i,iba,ibc->ac", t2, xs.conj(), xs)
    y_row = np.einsum("i,iab,icb->ac", 1.0 / t2, ys, ys.conj())
    y_col = np.einsum("iba,ibc->ac", ys.conj(), ys)
    return x_row, x_col, y_row, y_col


def combine(a: float, b: float, flavor: str) -> float:
    """Side value: a + b (standard) or √a + √b (loose)."""
    if flavor == "standard":
        return a + b
    if flavor == "loose":
        return math.sqrt(max(a, 0.0)) + math.sqrt(max(b, 0.0))
    raise InvalidParameter("ERR_FLAVOR", {"flavor": flavor, "allowed": list(FLAVORS)})


def check_constraint(w: WitnessSequence, flavor: str = "standard") -> ConstraintReport:
    if flavor not in FLAVORS:
        raise InvalidParameter("ERR_FLAVOR", {"flavor": flavor, "allowed": list(FLAVORS)})
    if not len(w):
        raise InvalidParameter("ERR_WITNESS_EMPTY", {})
    x_row, x_col, y_row, y_col = (op_norm(s) for s in square_sums(w))
    return ConstraintReport(
        flavor=flavor,
        x_row=x_row,
        x_col=x_col,
        y_row=y_row,
        y_col=y_col,
        x_value=combine(x_row, x_col, flavor),
        y_value=combine(y_row, y_col, flavor),
    )


def rescale_to_feasible(w: WitnessSequence, flavor: str = "standard") -> WitnessSequence:
    """
    Scale x and y independently so both side values equal 2 (or stay
    below it). Both sides are 2-homogeneous (standard) or 1-homogeneous
    (loose) in the scaling.
    """
    report = check_constraint(w, flavor)
    power = 0.5 if flavor == "standard" else 1.0

    def factor(value: float) -> float:
        if value <= 0:
            return 1.0
        return (2.0 / value) ** power

    return w.scaled(factor(report.x_value), factor(report.y_value))


def phase_aligned(u: FormTensor, w: WitnessSequence) -> WitnessSequence:
    """Rotate each x_i so u(x_i, y_i) ≥ 0; feasibility is unchanged."""
    values = w.values(u)
    mags = np.abs(values)
    phases = np.where(mags > 0, np.conj(values) / np.where(mags > 0, mags, 1.0), 1.0)
    return WitnessSequence(w.xs * phases[:, None, None], w.ys, w.ts)


# ============================================================
# Lift
# ============================================================

@dataclass
class LiftResult:
    """
    Lifted witness over Φ_d. Element j stands for

        x̃_j = x_{source[j]} ⊗ weight[j]·E_{row[j], col[j]}
        ỹ_j = t_{source[j]}^{-1} y_{source[j]} ⊗ weight[j]·E_{row[j], col[j]}

    with piece index piece[j] = row[j] + col[j]·d.
    """

    d: int
    state: SchmidtState
    witness: WitnessSequence
    source: np.ndarray
    piece: np.ndarray
    row: np.ndarray
    col: np.ndarray
    weight: np.ndarray

    def __len__(self) -> int:
        return int(self.source.size)

    @property
    def index_map(self) -> List[Tuple[int, int]]:
        return list(zip(self.source.tolist(), self.piece.tolist()))

    def _unit(self, j: int) -> np.ndarray:
        return self.weight[j] * matrix_unit(self.d, int(self.row[j]), int(self.col[j]))

    def lifted_x(self, j: int) -> np.ndarray:
        return np.kron(self.witness.xs[self.source[j]], self._unit(j))

    def lifted_y(self, j: int) -> np.ndarray:
        i = self.source[j]
        return np.kron(self.witness.ys[i] / self.witness.ts[i], self._unit(j))

    def _dense_guard(self, limit: int):
        if self.d > limit:
            raise InvalidParameter("ERR_DENSE_LIMIT", {"dim": self.d, "limit": limit})

    def xs_lifted(self, limit: int = DENSE_LIMIT) -> List[np.ndarray]:
        self._dense_guard(limit)
        return [self.lifted_x(j) for j in range(len(self))]

    def ys_lifted(self, limit: int = DENSE_LIMIT) -> List[np.ndarray]:
        self._dense_guard(limit)
        return [self.lifted_y(j) for j in range(len(self))]


def lift(w: WitnessSequence, d: int) -> LiftResult:
    if not len(w):
        raise InvalidParameter("ERR_WITNESS_EMPTY", {})
    d = require_positive_int(d, "d")

    families = {}
    source, piece, row, col, weight = [], [], [], [], []
    for i, t in enumerate(w.ts.tolist()):
        fam = families.get(t)
        if fam is None:
            fam = families[t] = line_family(d, t)
        source.append(np.full(fam.nnz, i, dtype=np.int64))
        piece.append(fam.piece_indices)
        row.append(fam.rows)
        col.append(fam.cols)
        weight.append(fam.weights)

    lr = LiftResult(
        d=d,
        state=embezzlement_state(d),
        witness=w,
        source=np.concatenate(source),
        piece=np.concatenate(piece).astype(np.int64),
        row=np.concatenate(row).astype(np.int64),
        col=np.concatenate(col).astype(np.int64),
        weight=np.concatenate(weight),
    )
    logger.debug("lift: %d elements -> %d lifted (d=%d)", len(w), len(lr), d)
    return lr


def _block_norm(d: int, index: np.ndarray, coeff: np.ndarray, grams: np.ndarray) -> float:
    """‖Σ_j coeff_j G_j ⊗ E_{index_j index_j}‖ = max over diagonal blocks."""
    k = grams.shape[-1]
    blocks = np.zeros((d, k, k), dtype=np.complex128)
    np.add.at(blocks, index, coeff[:, None, None] * grams)
    blocks = 0.5 * (blocks + np.conj(np.swapaxes(blocks, 1, 2)))
    return float(max(0.0, np.linalg.eigvalsh(blocks)[:, -1].max()))


def lifted_square_norms(lr: LiftResult) -> Dict[str, float]:
    """
    The four square-sum norms of the lifted witness, exploiting

        Σ x̃ x̃* = Σ_a (Σ_{row=a} w² x x*) ⊗ E_aa,
        Σ x̃* x̃ = Σ_b (Σ_{col=b} w² x* x) ⊗ E_bb,

    and likewise for ỹ with an extra t^{-2}. The lifted weight is 1.
    """
    w = lr.witness
    xs, ys = w.xs[lr.source], w.ys[lr.source]
    w2 = lr.weight**2
    inv_t2 = 1.0 / w.ts[lr.source] ** 2
    xx = np.einsum("iab,icb->iac", xs, xs.conj())
    xtx = np.einsum("iba,ibc->iac", xs.conj(), xs)
    yy = np.einsum("iab,icb->iac", ys, ys.conj())
    yty = np.einsum("iba,ibc->iac", ys.conj(), ys)
    return {
        "x_row": _block_norm(lr.d, lr.row, w2, xx),
        "x_col": _block_norm(lr.d, lr.col, w2, xtx),
        "y_row": _block_norm(lr.d, lr.row, w2 * inv_t2, yy),
        "y_col": _block_norm(lr.d, lr.col, w2 * inv_t2, yty),
    }


def dense_square_norms(lr: LiftResult, limit: int = 16) -> Dict[str, float]:
    """Same four norms from explicitly built lifted matrices (small d only)."""
    xs = lr.xs_lifted(limit)
    ys = lr.ys_lifted(limit)
    return {
        "x_row": op_norm(sum(x @ x.conj().T for x in xs)),
        "x_col": op_norm(sum(x.conj().T @ x for x in xs)),
        "y_row": op_norm(sum(y @ y.conj().T for y in ys)),
        "y_col": op_norm(sum(y.conj().T @ y for y in ys)),
    }


# ============================================================
# Verification
# ============================================================

@dataclass
class LiftReport:
    d: int
    original_norms: Dict[str, float]
    lifted_norms: Dict[str, float]
    lifted_value: complex
    identity_value: complex
    identity_error: float
    input_value: complex
    deficit: float
    allowed_deficit: float
    max_line_deficit: float
    abs_sum: float
    tol: float = FEASIBILITY_TOL
    identity_rtol: float = IDENTITY_RTOL
    warnings: List[str] = field(default_factory=list)

    @property
    def slacks(self) -> Dict[str, float]:
        return {k: self.original_norms[k] - self.lifted_norms[k] for k in self.original_norms}

    @property
    def constraint_ok(self) -> bool:
        return all(s >= -self.tol for s in self.slacks.values())

    @property
    def identity_ok(self) -> bool:
        return self.identity_error <= self.identity_rtol

    @property
    def deficit_ok(self) -> bool:
        return self.deficit <= self.allowed_deficit + self.tol * max(1.0, self.abs_sum)

    @property
    def passed(self) -> bool:
        return self.constraint_ok and self.identity_ok and self.deficit_ok

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "original_norms": self.original_norms,
            "lifted_norms": self.lifted_norms,
            "slacks": self.slacks,
            "constraint_ok": self.constraint_ok,
            "lifted_value": encode_complex(self.lifted_value),
            "identity_value": encode_complex(self.identity_value),
            "identity_error": self.identity_error,
            "identity_ok": self.identity_ok,
            "input_value": encode_complex(self.input_value),
            "deficit": self.deficit,
            "allowed_deficit": self.allowed_deficit,
            "max_line_deficit": self.max_line_deficit,
            "deficit_ok": self.deficit_ok,
            "passed": self.passed,
            "warnings": list(self.warnings),
        }


def _lifted_phi(lr: LiftResult, via_state_form_value: bool) -> np.ndarray:
    """φ(w E_ab, w E_ab) for each lifted element."""
    if not via_state_form_value and lr.state.is_canonical:
        c = lr.state.coeffs
        return lr.weight**2 * c[lr.row] * c[lr.col]
    out = np.empty(len(lr))
    for j in range(len(lr)):
        unit = lr._unit(j)
        out[j] = state_form_value(lr.state, unit, unit).real
    return out


def verify_lift(
    u: FormTensor,
    w: WitnessSequence,
    lr: LiftResult,
    *,
    via_state_form_value: Optional[bool] = None,
    tol: float = FEASIBILITY_TOL,
    identity_rtol: float = IDENTITY_RTOL,
) -> LiftReport:
    """
    Check a lift against its source witness.

    (a) the four square-sum norms do not grow;
    (b) V = Σ_j (u⊗φ)(x̃_j, ỹ_j), with φ = ⟨Φ_d, (· ⊗ ·) Φ_d⟩;
    (c) V = Σ_i t_i^{-1} u(x_i, y_i) ⟨z, L(t_i) z⟩ to identity_rtol relative;
    (d) |Σ u(x_i, y_i)| − |V| ≤ max_i(1 − ⟨z, L(t_i) z⟩/t_i) · Σ |u(x_i, y_i)|.

    By default (b) goes through state_form_value piece by piece for
    d ≤ 64 and through the closed form above that.
    """
    _check_form(u, w)
    if lr.witness is not w and (lr.witness.xs.shape != w.xs.shape or lr.witness.ys.shape != w.ys.shape):
        raise DimensionMismatch(
            "ERR_LIFT_WITNESS",
            {"lift": list(lr.witness.xs.shape), "witness": list(w.xs.shape)},
        )
    if via_state_form_value is None:
        via_state_form_value = lr.d <= DENSE_LIMIT

    original = check_constraint(w)
    original_norms = {
        "x_row": original.x_row,
        "x_col": original.x_col,
        "y_row": original.y_row,
        "y_col": original.y_col,
    }
    lifted_norms = lifted_square_norms(lr)

    u_terms = w.values(u)
    phi = _lifted_phi(lr, via_state_form_value)
    lifted_value = complex(np.sum(u_terms[lr.source] / w.ts[lr.source] * phi))

    line_values = np.array([line_value(lr.d, t) for t in w.ts.tolist()])
    identity_terms = u_terms / w.ts * line_values
    identity_value = complex(np.sum(identity_terms))
    scale = float(np.sum(np.abs(identity_terms)))
    identity_error = abs(lifted_value - identity_value) / scale if scale > 0 else abs(lifted_value)

    line_deficits = np.maximum(0.0, 1.0 - line_values / w.ts)
    input_value = complex(np.sum(u_terms))
    abs_sum = float(np.sum(np.abs(u_terms)))
    report = LiftReport(
        d=lr.d,
        original_norms=original_norms,
        lifted_norms=lifted_norms,
        lifted_value=lifted_value,
        identity_value=identity_value,
        identity_error=identity_error,
        input_value=input_value,
        deficit=abs(input_value) - abs(lifted_value),
        allowed_deficit=float(line_deficits.max()) * abs_sum,
        max_line_deficit=float(line_deficits.max()),
        abs_sum=abs_sum,
        tol=tol,
        identity_rtol=identity_rtol,
    )
    if not report.identity_ok:
        logger.warning("lift identity off by %.3e (d=%d)", identity_error, lr.d)
    return report


# ============================================================
# Truncation
# ============================================================

@dataclass
class TruncationResult:
    witness: WitnessSequence
    threshold: float
    dropped_large: List[int]
    dropped_small: List[int]
    rescaled: Optional[WitnessSequence]
    rescaled_constraint: Optional[ConstraintReport]
    input_value: Optional[complex] = None
    kept_value: Optional[complex] = None
    dropped_value: Optional[complex] = None
    rescaled_value: Optional[complex] = None

    @property
    def full_drop(self) -> bool:
        return len(self.witness) == 0 and bool(self.dropped_large or self.dropped_small)

    def to_dict(self) -> dict:
        def c(v):
            return None if v is None else encode_complex(v)

        return {
            "threshold": self.threshold,
            "kept": len(self.witness),
            "dropped_large": self.dropped_large,
            "dropped_small": self.dropped_small,
            "full_drop": self.full_drop,
            "rescaled_constraint": None if self.rescaled_constraint is None else self.rescaled_constraint.to_dict(),
            "input_value": c(self.input_value),
            "kept_value": c(self.kept_value),
            "dropped_value": c(self.dropped_value),
            "rescaled_value": c(self.rescaled_value),
        }


def truncation_threshold(eta_e: float, eta_f: float, eps: float) -> float:
    return 8.0 * eta_e * eta_f / eps


def truncate(
    w: WitnessSequence,
    eta_e: float,
    eta_f: float,
    eps: float,
    u: Optional[FormTensor] = None,
    tol: float = FEASIBILITY_TOL,
) -> TruncationResult:
    """
    Drop elements with t_i ≥ T or 1/t_i ≥ T, T = 8·η_E·η_F/ε.

    The dropped part is also returned rescaled to common weight 1:
    x̃ = T x/(2η_E), ỹ = y/(2η_F) where t ≥ T and x̃ = x/(2η_E),
    ỹ = T y/(2η_F) where 1/t ≥ T, so that Σ u(x̃, ỹ) = T/(4η_Eη_F)
    times the dropped value.
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise InvalidParameter("ERR_EPS_RANGE", {"eps": eps})
    for name, eta in (("eta_E", eta_e), ("eta_F", eta_f)):
        require_positive(eta, name)
        if eta < 1.0:
            raise InvalidParameter("ERR_ETA_RANGE", {"name": name, "value": float(eta)})

    if len(w):
        report = check_constraint(w)
        if report.violation > tol:
            raise PreconditionViolation(
                "ERR_INFEASIBLE_WITNESS",
                {"x_value": report.x_value, "y_value": report.y_value, "violation": report.violation},
            )

    T = truncation_threshold(eta_e, eta_f, eps)
    large = np.flatnonzero(w.ts >= T)
    small = np.flatnonzero(1.0 / w.ts >= T)
    keep = np.setdiff1d(np.arange(len(w)), np.concatenate([large, small]))
    kept = w.subset(keep)

    rescaled = None
    rescaled_constraint = None
    if large.size or small.size:
        xs = np.concatenate([w.xs[large] * T / (2 * eta_e), w.xs[small] / (2 * eta_e)])
        ys = np.concatenate([w.ys[large] / (2 * eta_f), w.ys[small] * T / (2 * eta_f)])
        rescaled = WitnessSequence(xs, ys, np.ones(xs.shape[0]))
        rescaled_constraint = check_constraint(rescaled)

    result = TruncationResult(
        witness=kept,
        threshold=T,
        dropped_large=large.tolist(),
        dropped_small=small.tolist(),
        rescaled=rescaled,
        rescaled_constraint=rescaled_constraint,
    )
    if u is not None:
        values = w.values(u) if len(w) else np.zeros(0, dtype=np.complex128)
        result.input_value = complex(values.sum())
        result.kept_value = complex(values[keep].sum())
        result.dropped_value = complex(values[np.concatenate([large, small])].sum())
        result.rescaled_value = rescaled.value(u) if rescaled is not None else 0j

    if result.full_drop:
        logger.warning("truncate: every element dropped (T=%.6g)", T)
    return result


# ============================================================
# Witness from an amplified pair
# ============================================================

def witness_from_amplification(
    u: FormTensor,
    a,
    b,
    omega: SchmidtState,
    omega_p: SchmidtState,
    tol: float = FEASIBILITY_TOL,
    zero_tol: float = SCHMIDT_ZERO_TOL,
) -> WitnessSequence:
    """
    x̃_ij = λ_i (I ⊗ e_i*) a (I ⊗ g_j), ỹ_ij = μ_j (I ⊗ f_i*) b (I ⊗ h_j)
    and t_ij = μ_j/λ_i, where
    Ω = Σ λ_i e_i ⊗ f_i and Ω′ = Σ μ_j g_j ⊗ h_j. Pairs with a zero
    Schmidt coefficient are skipped.

    Σ u(x̃_ij, ỹ_ij) = ⟨Ω, u_d(a, b) Ω′⟩.
    """
    a = as_cmatrix(a, "a")
    b = as_cmatrix(b, "b")
    _, d_a = split_legs(a, u.n)
    _, d_b = split_legs(b, u.m)
    if not d_a == d_b == omega.dim == omega_p.dim:
        raise DimensionMismatch(
            "ERR_PAIRING_DIMS",
            {"d_a": d_a, "d_b": d_b, "omega": omega.dim, "omega_p": omega_p.dim},
        )
    for name, state in (("omega", omega), ("omega_p", omega_p)):
        norm = float(np.linalg.norm(state.coeffs))
        if abs(norm - 1.0) > tol:
            raise PreconditionViolation("ERR_NOT_UNIT", {"name": name, "norm": norm})
    for name, mat in (("a", a), ("b", b)):
        norm = op_norm(mat)
        if norm > 1.0 + tol:
            raise PreconditionViolation("ERR_NOT_CONTRACTION", {"name": name, "norm": norm})

    e, f = omega.bases()
    g, h = omega_p.bases()
    lam, mu = omega.coeffs, omega_p.coeffs
    cx = partial_matrix_elements(a, u.n, e, g)
    cy = partial_matrix_elements(b, u.m, f, h)

    rows = np.flatnonzero(lam > zero_tol)
    cols = np.flatnonzero(mu > zero_tol)
    ii, jj = np.meshgrid(rows, cols, indexing="ij")
    ii, jj = ii.reshape(-1), jj.reshape(-1)

    xs = lam[ii][:, None, None] * np.moveaxis(cx[:, :, ii, jj], -1, 0)
    ys = mu[jj][:, None, None] * np.moveaxis(cy[:, :, ii, jj], -1, 0)
    ts = mu[jj] / lam[ii]
    return WitnessSequence(xs, ys, ts)


def amplified_value(u: FormTensor, a, b, omega: SchmidtState, omega_p: SchmidtState) -> complex:
    return pair_with_states(u, a, b, omega, omega_p)


# ============================================================
# Pipeline sizing
# ============================================================

def pipeline_dimension(max_weight: float, c_hat: float, eps: float) -> float:
    """
    d = ⌈(1 + max_weight)^{Ĉ/ε}⌉, the state dimension at which the lift
    deficit bound drops to ε·Ĉ-scale. Returns math.inf when the exponent
    overflows a float.
    """
    require_positive(max_weight, "max_weight")
    eps = require_positive(eps, "eps")
    if c_hat < 0:
        raise InvalidParameter("ERR_NEGATIVE_CONSTANT", {"c_hat": float(c_hat)})
    exponent = c_hat / eps * math.log1p(max_weight)
    if exponent > 700:
        return math.inf
    return float(max(1, math.ceil(math.exp(exponent) - 1e-12)))


# ============================================================
# Random instances
# ============================================================

def random_witness(
    rng: np.random.Generator,
    n: int,
    m: int,
    length: int,
    log_t_scale: float = 1.0,
    flavor: str = "standard",
) -> WitnessSequence:
    """Ginibre x_i, y_i and log-normal t_i, rescaled onto the constraint."""
    length = require_positive_int(length, "length")
    xs = (rng.standard_normal((length, n, n)) + 1j * rng.standard_normal((length, n, n))) / np.sqrt(2)
    ys = (rng.standard_normal((length, m, m)) + 1j * rng.standard_normal((length, m, m))) / np.sqrt(2)
    ts = np.exp(log_t_scale * rng.standard_normal(length))
    return rescale_to_feasible(WitnessSequence(xs, ys, ts), flavor)
