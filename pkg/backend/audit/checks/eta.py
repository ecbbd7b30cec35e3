"""
Audit check: row/column ratio

Random sequences in M_n never inflate ‖Σ x x*‖ past n‖Σ x* x‖, and the
matrix-unit witness attains n.
"""

from backend.forms.eta import matrix_unit_witness, rc_ratio
from backend.seeding import STREAM_INSTANCE, rng_for
from ..contracts import hard_check
from ..registry import register_check

ETA_CELL = 3


def check_eta(seed, quick=False):
    samples = 300 if quick else 3400
    results = []
    for n in (2, 3, 4):
        worst = 0.0
        for k in range(samples):
            rng = rng_for(seed, STREAM_INSTANCE, ETA_CELL, n, k)
            length = int(rng.integers(1, 2 * n + 1))
            xs = rng.standard_normal((length, n, n)) + 1j * rng.standard_normal((length, n, n))
            worst = max(worst, rc_ratio(xs))
        unit = rc_ratio(matrix_unit_witness(n))
        results.append(
            hard_check(
                f"eta.rc_bound.n{n}",
                worst <= n * (1 + 1e-10) and abs(unit - n) <= 1e-12,
                "‖Σ x x*‖ ≤ n ‖Σ x* x‖, attained by matrix units",
                n=n,
                samples=samples,
                max_ratio=worst,
                matrix_unit_ratio=unit,
            )
        )
    return results


# ----------------------------------------
# Registration
# ----------------------------------------
register_check("eta", check_eta)
