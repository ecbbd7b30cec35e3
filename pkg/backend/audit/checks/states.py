"""
Audit check: states

Harmonic normalization bound, unit norms and the embezzlement curve.
"""

import math

import numpy as np

from backend.states import embezzle, embezzlement_state, max_entangled_state, normalization_constant
from ..contracts import hard_check
from ..registry import register_check


def check_states(seed, quick=False):
    dims = [2**k for k in range(0, 11 if quick else 21)]
    excess = max(normalization_constant(d) - (1.0 + math.log(d)) for d in dims)

    norm_error = 0.0
    for d in dims[:12]:
        for state in (embezzlement_state(d), max_entangled_state(d)):
            norm_error = max(norm_error, abs(float(np.linalg.norm(state.coeffs)) - 1.0))

    target = max_entangled_state(2)
    fidelities = [embezzle(2**k, target).fidelity for k in range(4, 9 if quick else 13)]
    increasing = all(b > a for a, b in zip(fidelities, fidelities[1:]))

    return [
        hard_check("states.harmonic_bound", excess <= 0.0, "Z_d ≤ 1 + ln d", max_excess=excess),
        hard_check("states.unit_norm", norm_error <= 1e-12, "Φ_d and Ψ_d are unit vectors", max_error=norm_error),
        hard_check(
            "states.embezzle_monotone",
            increasing,
            "embezzling Ψ_2 from Φ_D improves with D",
            fidelities=fidelities,
        ),
    ]


# ----------------------------------------
# Registration
# ----------------------------------------
register_check("states", check_states)
