"""
Audit check: lifting

Lift feasibility and the exact value identity on random instances, and
the witness built from an amplified pair.
"""

import numpy as np

from backend.forms.tensor import pair_with_states, random_form
from backend.lifting import (
    check_constraint,
    lift,
    random_witness,
    verify_lift,
    witness_from_amplification,
)
from backend.numerics import random_contraction
from backend.seeding import STREAM_INSTANCE, rng_for
from backend.states import random_state
from ..contracts import hard_check
from ..registry import register_check

LIFT_CELL = 1
AMPLIFICATION_CELL = 2


def check_lift_instances(seed, quick=False):
    dims = (2, 8) if quick else (8, 64, 512)
    instances = 5 if quick else 50
    worst_slack, worst_identity, failures = np.inf, 0.0, 0
    for k in range(instances):
        rng = rng_for(seed, STREAM_INSTANCE, LIFT_CELL, k)
        n, m, length = (int(v) for v in rng.integers(1, [4, 4, 5]))
        u = random_form(rng, n, m)
        w = random_witness(rng, n, m, length)
        for d in dims:
            report = verify_lift(u, w, lift(w, d))
            worst_slack = min(worst_slack, min(report.slacks.values()))
            worst_identity = max(worst_identity, report.identity_error)
            failures += 0 if report.constraint_ok and report.identity_ok else 1
    return [
        hard_check(
            "lifting.constraint",
            worst_slack >= -1e-10,
            "lifted square sums never exceed the originals",
            min_slack=worst_slack,
        ),
        hard_check(
            "lifting.identity",
            worst_identity <= 1e-10 and failures == 0,
            "lifted value = Σ t⁻¹ u(x, y) ⟨z, L(t) z⟩",
            max_relative_error=worst_identity,
        ),
    ]


def check_amplification_witness(seed, quick=False):
    instances = 10 if quick else 50
    worst_violation, worst_error = 0.0, 0.0
    for k in range(instances):
        rng = rng_for(seed, STREAM_INSTANCE, AMPLIFICATION_CELL, k)
        u = random_form(rng, 2, 2)
        a, b = random_contraction(rng, 4), random_contraction(rng, 4)
        omega, omega_p = random_state(rng, 2), random_state(rng, 2)
        w = witness_from_amplification(u, a, b, omega, omega_p)
        worst_violation = max(worst_violation, check_constraint(w).violation)
        target = pair_with_states(u, a, b, omega, omega_p)
        worst_error = max(worst_error, abs(w.value(u) - target))
    return [
        hard_check(
            "lifting.amplification_feasible",
            worst_violation <= 1e-8,
            "witness from an amplified pair is feasible",
            max_violation=worst_violation,
        ),
        hard_check(
            "lifting.amplification_value",
            worst_error <= 1e-10,
            "witness value = ⟨Ω, u_d(a, b) Ω′⟩",
            max_error=worst_error,
        ),
    ]


def check_lifting(seed, quick=False):
    return check_lift_instances(seed, quick) + check_amplification_witness(seed, quick)


# ----------------------------------------
# Registration
# ----------------------------------------
register_check("lifting", check_lifting)
