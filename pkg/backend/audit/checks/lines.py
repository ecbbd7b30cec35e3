"""
Audit check: line matrices

Row/column sums, the value sandwich, the operator bounds of the pieces
and the embedding identity over a (d, t²) grid.
"""

import math

import numpy as np

from backend.lines import (
    analytic_lower_bound,
    line_family_sq,
    simplified_lower_bound,
)
from backend.numerics import min_eigenvalue
from ..contracts import hard_check
from ..registry import register_check

T_SQUARED = (0.1, 1 / 3, 0.5, 1.0, 2.4, 3.0, 10.0)


def _grid(max_d: int):
    for t2 in T_SQUARED:
        for d in range(1, max_d + 1):
            yield d, t2


def check_line_sums(max_d: int = 64):
    worst_row, worst_col = -math.inf, -math.inf
    for d, t2 in _grid(max_d):
        fam = line_family_sq(d, t2)
        worst_row = max(worst_row, float(fam.row_sums().max()) - 1.0)
        worst_col = max(worst_col, float(fam.col_sums().max()) - t2)
    return [
        hard_check(
            "lines.sums",
            worst_row <= 1e-12 and worst_col <= 1e-12,
            "row sums ≤ 1 and column sums ≤ t²",
            max_row_excess=worst_row,
            max_col_excess=worst_col,
            max_d=max_d,
        )
    ]


def check_line_sandwich(max_d: int = 64):
    worst_low, worst_high, worst_simplified = -math.inf, -math.inf, -math.inf
    for d, t2 in _grid(max_d):
        t = math.sqrt(t2)
        value = line_family_sq(d, t2).quadratic_value()
        analytic = analytic_lower_bound(d, t)
        worst_low = max(worst_low, analytic - value)
        worst_high = max(worst_high, value - t)
        worst_simplified = max(worst_simplified, simplified_lower_bound(d, t) - analytic)
    return [
        hard_check(
            "lines.sandwich",
            worst_low <= 1e-10 and worst_high <= 1e-10,
            "analytic bound ≤ ⟨z, L z⟩ ≤ t",
            max_low_excess=worst_low,
            max_high_excess=worst_high,
        ),
        hard_check(
            "lines.simplified",
            worst_simplified <= 1e-10,
            "simplified bound ≤ analytic bound",
            max_excess=worst_simplified,
        ),
    ]


def check_piece_bounds(max_d: int = 64):
    worst_row, worst_col, worst_identity = math.inf, math.inf, 0.0
    for d, t2 in _grid(max_d):
        fam = line_family_sq(d, t2)
        row_gram, col_gram = fam.gram_sums()
        eye = np.eye(d)
        worst_row = min(worst_row, min_eigenvalue(eye - row_gram))
        worst_col = min(worst_col, min_eigenvalue(t2 * eye - col_gram))
        worst_identity = max(worst_identity, abs(fam.embedded_value() - fam.quadratic_value()))
    return [
        hard_check(
            "lines.piece_bounds",
            worst_row >= -1e-10 and worst_col >= -1e-10,
            "Σ L^r L^r* ≤ I and Σ L^r* L^r ≤ t² I",
            min_row_eig=worst_row,
            min_col_eig=worst_col,
        ),
        hard_check(
            "lines.embedding_identity",
            worst_identity <= 1e-12,
            "Σ_r ⟨Φ, (L^r ⊗ L^r) Φ⟩ = ⟨z, L z⟩",
            max_error=worst_identity,
        ),
    ]


def check_lines(seed, quick=False):
    max_d = 16 if quick else 64
    return (
        check_line_sums(max_d)
        + check_line_sandwich(max_d)
        + check_piece_bounds(max_d)
    )


# ----------------------------------------
# Registration
# ----------------------------------------
register_check("lines", check_lines)
