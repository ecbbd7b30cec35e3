# cli/montecarlo_cli.py

import numpy as np

from backend.audit.contracts import hard_check, monitor
from backend.lifting import random_witness
from backend.numerics import matrix_unit
from backend.randmat import ht_dimension, mc_ht, mc_jp
from backend.seeding import STREAM_INSTANCE, rng_for
from cli.common import add_flags, begin, finish, load_form

JP_WITNESS_CELL = 2


def register_montecarlo_subparser(subparsers):
    p = subparsers.add_parser(
        "montecarlo",
        help="Gaussian random-matrix checks: operator-norm bound and the jp identity",
    )
    add_flags(p, "n", "eps", "samples", "ht_d", "length", "jp_d", "jp_samples", form=True)
    p.set_defaults(func=cmd_montecarlo)


def _diagonal_units(n: int):
    return [matrix_unit(n, k, k) for k in range(n)]


def cmd_montecarlo(cfg):
    ctx = begin(cfg)
    sigmas = cfg.tolerances.sigmas
    rows, checks, warnings = [], [], []

    # ‖Σ a_j ⊗ G_j‖² for a_j = E_kk: both square sums are the identity
    ht_cases = [
        ("ht.diagonal", cfg.n, cfg.eps, cfg.ht_d),
        ("ht.scalar", 1, 1.0, None),
    ]
    for label, n, eps, d in ht_cases:
        report = mc_ht(
            _diagonal_units(n),
            gamma=1.0,
            eps=eps,
            samples=cfg.samples,
            seed=cfg.seed,
            d=d,
            progress=cfg.progress,
            sigmas=sigmas,
        )
        rows.append({
            "check": label,
            "n": n,
            "eps": eps,
            "d_formula": ht_dimension(n, eps),
            **report.to_dict(),
        })
        checks.append(hard_check(
            f"montecarlo.{label}",
            report.passed,
            f"mean ‖S_d‖² ≤ (1 + ε)(√γ + 1)² within {sigmas:g}σ",
            mean=report.mean,
            std_error=report.std_error,
            bound=report.bound,
        ))

    u = load_form(cfg)
    rng = rng_for(cfg.seed, STREAM_INSTANCE, JP_WITNESS_CELL)
    w = random_witness(rng, u.n, u.m, cfg.length, log_t_scale=0.0, flavor="loose")
    jp = mc_jp(
        u, w, d=cfg.jp_d, eps=cfg.eps, samples=cfg.jp_samples, seed=cfg.seed,
        progress=cfg.progress, sigmas=sigmas,
    )
    warnings.extend(jp.warnings)

    gap = abs(jp.mean_value - jp.exact_value)
    rows.append({
        "check": "jp",
        "n": u.n,
        "m": u.m,
        "length": len(w),
        "d": jp.d,
        "samples": jp.samples,
        "exact_abs": abs(jp.exact_value),
        "mean_gap": gap,
        "value_std_error": jp.value_std_error,
        "norm_product_mean": jp.norm_product.mean,
        "norm_product_bound": jp.norm_product.bound,
        "gram_max_error": float(np.max(np.abs(jp.gram_mean - np.eye(len(w))))),
        "pass": jp.passed,
    })
    checks.extend([
        hard_check(
            "montecarlo.jp.identity",
            jp.identity_passed,
            f"mean ⟨Ψ, u_d(x, y) Ψ⟩ equals Σ u(x_i, y_i) within {sigmas:g}σ",
            gap=gap,
            std_error=jp.value_std_error,
        ),
        monitor(
            "montecarlo.jp.norms",
            jp.norm_product.passed,
            f"mean ‖x‖‖y‖ ≤ 4(1 + ε/2) within {sigmas:g}σ",
            mean=jp.norm_product.mean,
            bound=jp.norm_product.bound,
        ),
        monitor(
            "montecarlo.jp.gram",
            jp.gram_passed,
            f"d⁻¹ Tr(G_i G_j*) averages to δ_ij within {sigmas:g}σ",
        ),
    ])

    summary = {
        "ht_pass": all(r["pass"] for r in rows if r["check"].startswith("ht")),
        "jp_pass": jp.passed,
    }
    return finish(ctx, summary, checks, rows, warnings)
