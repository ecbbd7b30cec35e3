# cli/lifting_cli.py

"""
lift and pipeline commands.

pipeline chains the whole construction for one form:

    os_search → phase alignment → truncate (η = √n, √m)
      → fitted Ĉ → d from (1 + max t)^{Ĉ/ε}, capped by d_budget
      → lift / verify at d/4, d/2, d
      → Φ-frozen see-saw at min(d, 32)
      → Gaussian leg: dense lift at small d, reduced form on M_{nd},
        mc_jp at d′ from the Gaussian dimension formula, capped.
"""

import logging
import math

import numpy as np

from backend.audit.contracts import hard_check, monitor
from backend.forms.os_search import os_search
from backend.forms.seesaw import phi_norm_seesaw
from backend.forms.tensor import reduced_form
from backend.lifting import (
    WitnessSequence,
    check_constraint,
    lift,
    phase_aligned,
    pipeline_dimension,
    random_witness,
    truncate,
    verify_lift,
)
from backend.lines import fit_constant
from backend.progress import maybe_progress
from backend.randmat import jp_dimension, mc_jp
from backend.seeding import STREAM_INSTANCE, rng_for
from backend.states import embezzlement_state
from cli.common import add_flags, begin, finish, load_form, load_witness

logger = logging.getLogger(__name__)

WITNESS_CELL = 1
SEESAW_DIM_CAP = 32


def register_lifting_subparser(subparsers):
    p = subparsers.add_parser(
        "lift",
        help="Lift a witness onto Φ_d and verify norms, value identity and deficit",
    )
    add_flags(p, "d_grid", "length", "witness_path", form=True)
    p.set_defaults(func=cmd_lift)

    p = subparsers.add_parser(
        "pipeline",
        help="os_search → truncate → lift → ‖u_d^Φ‖ and the Gaussian leg",
    )
    add_flags(p, "length", "eps", "samples", "restarts", "d_budget", "d_prime_budget", form=True)
    p.set_defaults(func=cmd_pipeline)


def _lift_row(stage: str, rep) -> dict:
    return {
        "stage": stage,
        "d": rep.d,
        **{f"slack_{k}": v for k, v in rep.slacks.items()},
        "identity_error": rep.identity_error,
        "input_abs": abs(rep.input_value),
        "lifted_abs": abs(rep.lifted_value),
        "deficit": rep.deficit,
        "allowed_deficit": rep.allowed_deficit,
        "max_line_deficit": rep.max_line_deficit,
        "passed": rep.passed,
    }


def _lift_checks(prefix: str, rep) -> list:
    return [
        hard_check(
            f"{prefix}.constraint.d{rep.d}",
            rep.constraint_ok,
            "lifted square-sum norms do not exceed the original ones",
            slacks=rep.slacks,
        ),
        hard_check(
            f"{prefix}.identity.d{rep.d}",
            rep.identity_ok,
            "lifted value equals Σ t_i⁻¹ u(x_i, y_i) ⟨z, L(t_i) z⟩",
            error=rep.identity_error,
        ),
        hard_check(
            f"{prefix}.deficit.d{rep.d}",
            rep.deficit_ok,
            "value lost by the lift stays within the line deficits",
            deficit=rep.deficit,
            allowed=rep.allowed_deficit,
        ),
    ]


def _shrinking(prefix: str, reports) -> object:
    deficits = [r.deficit for r in reports]
    return monitor(
        f"{prefix}.deficit_shrinks",
        all(b <= a + 1e-12 for a, b in zip(deficits, deficits[1:])),
        "lift deficit does not grow with d",
        d=[r.d for r in reports],
        deficits=deficits,
    )


# ============================================================
# lift
# ============================================================

def cmd_lift(cfg):
    ctx = begin(cfg)
    u = load_form(cfg)
    tol = cfg.tolerances

    w = load_witness(cfg)
    source = "file"
    if w is None:
        rng = rng_for(cfg.seed, STREAM_INSTANCE, WITNESS_CELL)
        w = random_witness(rng, u.n, u.m, cfg.length)
        source = "random"

    reports = []
    for d in maybe_progress(sorted(set(cfg.d_grid)), desc="lift", enable=cfg.progress):
        reports.append(verify_lift(u, w, lift(w, d), tol=tol.feasibility, identity_rtol=tol.identity_rtol))

    rows = [_lift_row("lift", r) for r in reports]
    checks = [c for r in reports for c in _lift_checks("lift", r)]
    checks.append(_shrinking("lift", reports))

    summary = {
        "witness_source": source,
        "length": len(w),
        "max_weight": w.max_weight,
        "input_value": abs(w.value(u)),
        "lifted_values": {str(r.d): abs(r.lifted_value) for r in reports},
    }
    return finish(ctx, summary, checks, rows)


# ============================================================
# pipeline
# ============================================================

def _lift_dims(d: int) -> list:
    return sorted({max(1, d // 4), max(1, d // 2), d})


def _pick_branch(tr):
    """Kept part, or the unit-weight rescaled dropped part when it is worth more."""
    kept_abs = abs(tr.kept_value) if len(tr.witness) else -1.0
    if tr.rescaled is not None and tr.rescaled_constraint.violation <= 1e-9:
        if abs(tr.rescaled_value) > kept_abs:
            return "rescaled", tr.rescaled
    return "kept", tr.witness


def cmd_pipeline(cfg):
    ctx = begin(cfg)
    u = load_form(cfg)
    tol = cfg.tolerances
    eps = cfg.eps
    warnings = []
    rows, checks = [], []

    # --------------------------------------------------
    # os_search (standard constraint; truncate needs it)
    # --------------------------------------------------
    common = dict(flavor="standard", restarts=cfg.restarts, seed=cfg.seed)
    nc = os_search(u, cfg.length, fixed_t=1.0, **common)
    found = os_search(u, cfg.length, initial=nc.witness, **common)
    os_value = found.value
    checks.append(hard_check(
        "pipeline.os_feasible",
        found.constraint.violation <= 1e-9,
        "os_search witness is feasible",
        violation=found.constraint.violation,
    ))

    aligned = phase_aligned(u, found.witness)
    abs_sum = float(np.sum(np.abs(found.witness.values(u))))
    aligned_violation = check_constraint(aligned).violation
    checks.append(hard_check(
        "pipeline.phase_alignment",
        abs(aligned.value(u) - abs_sum) <= tol.certificate * max(1.0, abs_sum)
        and abs(aligned_violation - found.constraint.violation) <= tol.feasibility,
        "phase-aligned witness has value Σ|u(x_i, y_i)| and the same constraint",
        abs_sum=abs_sum,
    ))
    rows.append({"stage": "os_search", "nc": nc.value, "os": os_value, "abs_sum": abs_sum})

    # --------------------------------------------------
    # truncation
    # --------------------------------------------------
    tr = truncate(aligned, math.sqrt(u.n), math.sqrt(u.m), eps, u, tol=1e-9)
    branch, w = _pick_branch(tr)
    if not len(w):
        logger.error("pipeline: truncation left nothing usable (T=%.6g)", tr.threshold)
        checks.append(hard_check(
            "pipeline.truncation_nonempty", False, "truncation kept a witness", **tr.to_dict()
        ))
        return finish(ctx, {"os": os_value}, checks, rows, warnings)

    truncated_violation = check_constraint(w).violation
    checks.append(hard_check(
        "pipeline.truncation_feasible",
        truncated_violation <= 1e-9,
        "truncated witness satisfies the constraint",
        violation=truncated_violation,
        branch=branch,
    ))
    truncated_value = abs(w.value(u))
    checks.append(monitor(
        "pipeline.truncation_retains",
        truncated_value >= (1.0 - eps) * abs_sum - tol.certificate,
        "truncation keeps (1 − ε) of the aligned value",
        kept=truncated_value,
        input=abs_sum,
    ))
    rows.append({
        "stage": "truncate",
        "threshold": tr.threshold,
        "branch": branch,
        "dropped": len(tr.dropped_large) + len(tr.dropped_small),
        "value": truncated_value,
        "max_weight": w.max_weight,
    })

    # --------------------------------------------------
    # dimension schedule
    # --------------------------------------------------
    c_hat = fit_constant([math.sqrt(t2) for t2 in cfg.t_squared], cfg.d_grid)
    d_required = pipeline_dimension(w.max_weight, c_hat, eps)
    d = int(min(d_required, cfg.d_budget))
    if d_required > cfg.d_budget:
        warnings.append("WARN_PIPELINE_D_CAPPED")
        logger.warning("pipeline: d=%s exceeds d_budget=%d, using %d", d_required, cfg.d_budget, d)
    rows.append({"stage": "schedule", "c_hat": c_hat, "d_required": d_required, "d": d})

    # --------------------------------------------------
    # lift
    # --------------------------------------------------
    reports = [
        verify_lift(u, w, lift(w, dd), tol=tol.feasibility, identity_rtol=tol.identity_rtol)
        for dd in maybe_progress(_lift_dims(d), desc="pipeline lift", enable=cfg.progress)
    ]
    rows.extend(_lift_row("lift", r) for r in reports)
    checks.extend(c for r in reports for c in _lift_checks("pipeline.lift", r))
    checks.append(_shrinking("pipeline.lift", reports))

    # --------------------------------------------------
    # ‖u_d^Φ‖
    # --------------------------------------------------
    d_seesaw = min(d, SEESAW_DIM_CAP)
    est = phi_norm_seesaw(u, d_seesaw, restarts=cfg.restarts, seed=cfg.seed)
    checks.append(hard_check(
        "pipeline.phi_certificate",
        abs(est.reevaluate(u) - est.value) <= tol.certificate * max(1.0, est.value),
        "Φ-frozen certificate re-evaluates to the reported value",
    ))
    checks.append(monitor(
        "pipeline.phi_vs_os",
        est.value >= cfg.monitor_ratio * os_value,
        f"‖u_d^Φ‖ estimate ≥ {cfg.monitor_ratio:g} × os(u)",
        phi=est.value,
        os=os_value,
        floor=0.5 * (1.0 - eps) * os_value,
    ))
    rows.append({"stage": "phi_seesaw", "d": d_seesaw, "value": est.value, "ratio": est.value / os_value if os_value else None})

    # --------------------------------------------------
    # Gaussian leg
    # --------------------------------------------------
    d_g = max(1, cfg.gaussian_max_dim // max(u.n, u.m))
    lr = lift(w, d_g)
    lifted = WitnessSequence(
        np.stack(lr.xs_lifted()), np.stack(lr.ys_lifted()), np.ones(len(lr))
    )
    u_red = reduced_form(u, embezzlement_state(d_g))
    lifted_rep = verify_lift(u, w, lr, tol=tol.feasibility, identity_rtol=tol.identity_rtol)
    reduced_value = lifted.value(u_red)
    checks.append(hard_check(
        "pipeline.reduced_form_identity",
        abs(reduced_value - lifted_rep.lifted_value)
        <= cfg.tolerances.identity_rtol * max(1.0, lifted_rep.abs_sum),
        "Σ u_d^Φ(x̃_j, ỹ_j) on the reduced form equals the lifted value",
        reduced=abs(reduced_value),
        lifted=abs(lifted_rep.lifted_value),
    ))

    d_formula = jp_dimension(u_red.n, eps)
    d_prime = min(d_formula, cfg.d_prime_budget)
    if d_formula > cfg.d_prime_budget:
        warnings.append("WARN_PIPELINE_D_PRIME_CAPPED")
        logger.warning("pipeline: d′=%d exceeds d_prime_budget=%d", d_formula, cfg.d_prime_budget)

    jp = mc_jp(
        u_red, lifted, d=d_prime, eps=eps, samples=cfg.samples, seed=cfg.seed,
        progress=cfg.progress, sigmas=tol.sigmas,
    )
    warnings.extend(jp.warnings)
    checks.extend([
        monitor(
            "pipeline.jp_identity",
            jp.identity_passed,
            f"E⟨Ψ, u(x, y) Ψ⟩ matches Σ u(x̃_j, ỹ_j) within {tol.sigmas:g}σ",
            mean=jp.mean_value,
            exact=jp.exact_value,
            std_error=jp.value_std_error,
        ),
        monitor(
            "pipeline.jp_norms",
            jp.norm_product.passed,
            f"E‖x‖‖y‖ ≤ 4(1 + ε/2) within {tol.sigmas:g}σ",
            **jp.norm_product.to_dict(),
        ),
        monitor("pipeline.jp_gram", jp.gram_passed, f"Gaussian Gram means ≈ I within {tol.sigmas:g}σ"),
    ])
    rows.append({
        "stage": "gaussian",
        "d": d_g,
        "d_prime": d_prime,
        "d_prime_formula": d_formula,
        "exact": abs(jp.exact_value),
        "mean": abs(jp.mean_value),
        "norm_product": jp.norm_product.mean,
    })

    summary = {
        "form": {"n": u.n, "m": u.m, "source": cfg.form.kind},
        "nc": nc.value,
        "os": os_value,
        "truncated": truncated_value,
        "c_hat": c_hat,
        "d": d,
        "lifted": abs(reports[-1].lifted_value),
        "phi_norm": est.value,
        "gaussian_mean": abs(jp.mean_value),
    }
    return finish(ctx, summary, checks, rows, warnings)
