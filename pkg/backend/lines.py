"""
backend/lines.py

"Line" matrices and their rank-one pieces.

For t > 0 the d×d matrix L(t) has (i, j) entry equal to the length of
[i-1, i) ∩ [(j-1)t², j t²). Rows sum to at most 1, columns to at most t²,
and with z = Z_d^{-1/2}(i^{-1/2})_i the quadratic form ⟨z, L(t) z⟩ sits
between an explicit logarithmic lower bound and t.

The family L^r(t), r = i + (j-1)d, keeps the single entry √L(t)_{ij} at
(i, j). Its row and column Gram sums are diag(row sums) and
diag(column sums), and Σ_r ⟨Φ_d, (L^r ⊗ L^r) Φ_d⟩ = ⟨z, L(t) z⟩.

Entries are computed in closed form, never by quadrature. Sparse
triplets (O(nnz)) carry the large-d sweeps; the dense matrix scatters
the identical floating point values.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from PIL import Image

from backend.errors import ExportError, InvalidParameter, require_positive, require_positive_int
from backend.states import (
    DENSE_LIMIT,
    SchmidtState,
    embezzlement_coeffs,
    embezzlement_state,
    normalization_constant,
    state_form_value,
)

logger = logging.getLogger(__name__)

PIECES_LIMIT = 32
QUADRATIC_DENSE_LIMIT = 1024
SLIVER_ULPS = 4.0


# ============================================================
# Entries
# ============================================================

def _overlap(i, j, t2: float):
    """
    |[i-1, i) ∩ [(j-1)t², j t²)| for 1-based float index arrays, with the
    rounding scale of each difference (a few ulps of its larger endpoint).
    """
    hi = np.minimum(i, j * t2)
    lo = np.maximum(i - 1.0, (j - 1.0) * t2)
    scale = SLIVER_ULPS * np.finfo(np.float64).eps * np.maximum(np.abs(hi), np.abs(lo))
    return np.maximum(0.0, hi - lo), scale


def _validate(d, t2) -> Tuple[int, float]:
    d = require_positive_int(d, "d")
    t2 = require_positive(t2, "t_squared")
    return d, t2


def line_entries(d: int, t_squared: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nonzero entries of L(t) as zero-based (rows, cols, values).

    Row i only meets columns floor((i-1)/t²)+1 .. ceil(i/t²); the
    candidate range is widened by one on each side and filtered, so
    floating point rounding of the interval ends cannot drop an entry.
    An overlap no larger than a few ulps of its interval endpoints is a
    rounding sliver (t = √3 squares to 2.9999999999999996) and is
    discarded. The cut-off scales with the endpoints, so genuine entries
    survive for arbitrarily small t.
    """
    d, t2 = _validate(d, t_squared)
    i = np.arange(1, d + 1, dtype=np.float64)
    j_lo = np.maximum(1, np.floor((i - 1.0) / t2).astype(np.int64))
    j_hi = np.minimum(d, np.ceil(i / t2).astype(np.int64) + 1)
    counts = np.maximum(0, j_hi - j_lo + 1)

    rows = np.repeat(np.arange(1, d + 1, dtype=np.int64), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    cols = np.repeat(j_lo, counts) + (np.arange(rows.size) - starts)

    vals, scale = _overlap(rows.astype(np.float64), cols.astype(np.float64), t2)
    keep = vals > scale
    return rows[keep] - 1, cols[keep] - 1, vals[keep]


def line_matrix_sq(d: int, t_squared: float) -> np.ndarray:
    """L(t) given t² directly (exact for t² = 3, 2.4, ...)."""
    rows, cols, vals = line_entries(d, t_squared)
    out = np.zeros((int(d), int(d)), dtype=np.float64)
    out[rows, cols] = vals
    return out


def line_matrix(d: int, t: float) -> np.ndarray:
    t = require_positive(t, "t")
    return line_matrix_sq(d, t * t)


# ============================================================
# Quadratic form and bounds
# ============================================================

def line_vector(d: int) -> np.ndarray:
    """z = Z_d^{-1/2} (i^{-1/2})_i, the Schmidt profile of Φ_d."""
    return embezzlement_coeffs(d)


def line_value(d: int, t: float) -> float:
    """⟨z, L(t) z⟩."""
    t = require_positive(t, "t")
    rows, cols, vals = line_entries(d, t * t)
    z = line_vector(d)
    return float(np.sum(vals * z[rows] * z[cols]))


def analytic_lower_bound(d: int, t: float) -> float:
    """
    (2t/Z_d)(ln(√(d·min(1,t²)+1) + √(d·min(1,t²)+t²)) − ln(t+1)),
    with the exact harmonic Z_d.
    """
    d = require_positive_int(d, "d")
    t = require_positive(t, "t")
    mass = d * min(1.0, t * t)
    z_d = normalization_constant(d)
    return (2.0 * t / z_d) * (
        math.log(math.sqrt(mass + 1.0) + math.sqrt(mass + t * t)) - math.log(t + 1.0)
    )


def simplified_lower_bound(d: int, t: float) -> float:
    """t(ln(2d·min(1,t²) + (1+t)²) − 2 ln(t+1)) / (1 + ln d)."""
    d = require_positive_int(d, "d")
    t = require_positive(t, "t")
    mass = d * min(1.0, t * t)
    return t * (math.log(2.0 * mass + (1.0 + t) ** 2) - 2.0 * math.log(t + 1.0)) / (1.0 + math.log(d))


def relative_deficit(d: int, t: float) -> float:
    """1 − ⟨z, L(t) z⟩ / t."""
    return 1.0 - line_value(d, t) / t


def decay_scale(d: int, t: float) -> float:
    """t·ln(1 + max(t, 1/t)) / (1 + ln d)."""
    return t * math.log(1.0 + max(t, 1.0 / t)) / (1.0 + math.log(d))


# ============================================================
# LineFamily
# ============================================================

@dataclass(frozen=True)
class LineFamily:
    """
    L(t), z and the d² single-entry pieces L^r(t) for one (d, t).

    Pieces are kept as sparse triplets; `piece(r)` and `pieces()`
    materialize them. Piece index r = i + j·d (zero-based i, j).
    """

    dim: int
    t: float
    t_squared: float
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    z: np.ndarray

    @property
    def L(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.float64)
        out[self.rows, self.cols] = self.values
        return out

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def weights(self) -> np.ndarray:
        return np.sqrt(self.values)

    @property
    def piece_indices(self) -> np.ndarray:
        return self.rows + self.cols * self.dim

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.rows, weights=self.values, minlength=self.dim)

    def col_sums(self) -> np.ndarray:
        return np.bincount(self.cols, weights=self.values, minlength=self.dim)

    def nonzero_pieces(self) -> Iterator[Tuple[int, int, int, float]]:
        """(r, i, j, √L_ij) for every piece that is not identically zero."""
        for i, j, w in zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()):
            yield i + j * self.dim, i, j, w

    def piece(self, r: int) -> np.ndarray:
        i, j = r % self.dim, r // self.dim
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        hit = (self.rows == i) & (self.cols == j)
        if np.any(hit):
            out[i, j] = np.sqrt(self.values[hit][0])
        return out

    def pieces(self, limit: int = PIECES_LIMIT) -> List[np.ndarray]:
        """All d² pieces, zero ones included."""
        if self.dim > limit:
            raise InvalidParameter("ERR_DENSE_LIMIT", {"dim": self.dim, "limit": limit})
        stack = np.zeros((self.dim * self.dim, self.dim, self.dim), dtype=np.complex128)
        stack[self.piece_indices, self.rows, self.cols] = self.weights
        return list(stack)

    def nonzero_stack(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        """The nonzero pieces as an (nnz, d, d) array."""
        if self.dim > limit:
            raise InvalidParameter("ERR_DENSE_LIMIT", {"dim": self.dim, "limit": limit})
        stack = np.zeros((self.nnz, self.dim, self.dim), dtype=np.complex128)
        stack[np.arange(self.nnz), self.rows, self.cols] = self.weights
        return stack

    def gram_sums(self, limit: int = DENSE_LIMIT) -> Tuple[np.ndarray, np.ndarray]:
        """(Σ_r L^r L^{r*}, Σ_r L^{r*} L^r) by explicit matrix products."""
        stack = self.nonzero_stack(limit)
        row_gram = np.einsum("rij,rkj->ik", stack, stack.conj())
        col_gram = np.einsum("rji,rjk->ik", stack.conj(), stack)
        return row_gram, col_gram

    def embedding_values(self, state: SchmidtState | None = None, dense: bool = False) -> np.ndarray:
        """
        φ(L^r, L^r) = ⟨s, (L^r ⊗ L^r) s⟩ for each nonzero piece.

        For the canonical Φ_d this is L_ij·z_i·z_j; `dense=True` (or a
        non-canonical state) routes every piece through state_form_value.
        """
        state = embezzlement_state(self.dim) if state is None else state
        if state.is_canonical and not dense:
            c = state.coeffs
            return self.values * c[self.rows] * c[self.cols]
        return np.array([
            state_form_value(state, self.piece(r), self.piece(r)).real
            for r, _, _, _ in self.nonzero_pieces()
        ])

    def embedded_value(self, state: SchmidtState | None = None, dense: bool = False) -> float:
        """Σ_r ⟨Φ, (L^r ⊗ L^r) Φ⟩."""
        return float(np.sum(self.embedding_values(state, dense)))

    def quadratic_value(self) -> float:
        """⟨z, L z⟩ as a plain dense quadratic form."""
        if self.dim > QUADRATIC_DENSE_LIMIT:
            return float(np.sum(self.values * self.z[self.rows] * self.z[self.cols]))
        return float(self.z @ (self.L @ self.z))


def _build_family(d: int, t: float, t2: float) -> LineFamily:
    rows, cols, vals = line_entries(d, t2)
    return LineFamily(
        dim=d, t=t, t_squared=t2, rows=rows, cols=cols, values=vals, z=line_vector(d),
    )


def line_family_sq(d: int, t_squared: float) -> LineFamily:
    d, t2 = _validate(d, t_squared)
    return _build_family(d, math.sqrt(t2), t2)


def line_family(d: int, t: float) -> LineFamily:
    t = require_positive(t, "t")
    d, t2 = _validate(d, t * t)
    return _build_family(d, t, t2)


# ============================================================
# Constant fit
# ============================================================

def fit_rows(t_grid: Sequence[float], d_grid: Sequence[int]) -> List[dict]:
    """Per-cell deficit, decay scale and ratio for fit_constant."""
    if not t_grid or not d_grid:
        raise InvalidParameter("ERR_EMPTY_GRID", {"t_grid": len(t_grid), "d_grid": len(d_grid)})
    rows = []
    for t in t_grid:
        for d in d_grid:
            value = line_value(d, t)
            deficit = max(0.0, t - value)
            scale = decay_scale(d, t)
            rows.append({
                "d": int(d),
                "t": float(t),
                "line_value": value,
                "deficit": deficit,
                "scale": scale,
                "ratio": deficit / scale,
            })
    return rows


def fit_constant(t_grid: Sequence[float], d_grid: Sequence[int]) -> float:
    """
    Smallest Ĉ with t − ⟨z, L(t) z⟩ ≤ Ĉ·t·ln(1+max(t,1/t))/(1+ln d) on
    every grid point. An empirical lower estimate of the universal
    constant; no extrapolation beyond the grid.
    """
    return max(row["ratio"] for row in fit_rows(t_grid, d_grid))


# ============================================================
# Heatmap export
# ============================================================

@dataclass
class HeatmapFiles:
    pgm: Path
    csv: Path


def heatmap_export(matrix, path) -> HeatmapFiles:
    """
    Write an 8-bit grayscale PGM (P5), one pixel per entry, the largest
    entry mapped to 255, plus a CSV sidecar with the raw entries in
    shortest round-trip float form.
    """
    arr = np.asarray(matrix)
    if np.iscomplexobj(arr):
        if np.max(np.abs(arr.imag), initial=0.0) > 0:
            raise InvalidParameter("ERR_HEATMAP_COMPLEX", {})
        arr = arr.real
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise InvalidParameter("ERR_HEATMAP_RANGE", {"shape": list(arr.shape)})

    top = float(arr.max(initial=0.0))
    pixels = np.zeros(arr.shape, dtype=np.uint8) if top == 0 else np.rint(
        255.0 * arr / top
    ).astype(np.uint8)

    pgm_path = Path(path).expanduser()
    csv_path = pgm_path.with_suffix(".csv")
    try:
        pgm_path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(pixels).save(pgm_path, format="PPM")
        with open(csv_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            for row in arr:
                writer.writerow([repr(float(v)) for v in row])
    except OSError as e:
        raise ExportError("ERR_EXPORT_IO", {"path": str(pgm_path), "error": str(e)}) from e

    logger.info("heatmap written: %s (%dx%d)", pgm_path, *arr.shape)
    return HeatmapFiles(pgm=pgm_path, csv=csv_path)


def read_heatmap_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as f:
        return np.array([[float(v) for v in row] for row in csv.reader(f)], dtype=np.float64)
