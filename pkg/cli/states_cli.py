# cli/states_cli.py

from backend.audit.contracts import hard_check
from backend.progress import maybe_progress
from backend.states import embezzle, max_entangled_state
from cli.common import add_flags, begin, finish


def register_states_subparser(subparsers):
    p = subparsers.add_parser(
        "embezzle",
        help="Fidelity of the sorting protocol that distills Ψ from Φ_D",
    )
    add_flags(p, "embezzle_dims", "target_dim")
    p.set_defaults(func=cmd_embezzle)


def cmd_embezzle(cfg):
    ctx = begin(cfg)
    target = max_entangled_state(cfg.target_dim)
    dims = sorted(set(cfg.embezzle_dims))

    rows = []
    for D in maybe_progress(dims, desc="embezzle", enable=cfg.progress):
        result = embezzle(D, target)
        rows.append({
            "resource_dim": D,
            "target_dim": cfg.target_dim,
            "fidelity": result.fidelity,
            "infidelity": 1.0 - result.fidelity,
        })

    fidelities = [r["fidelity"] for r in rows]
    checks = [
        hard_check(
            "embezzle.range",
            all(0.0 <= f <= 1.0 + 1e-12 for f in fidelities),
            "fidelities lie in [0, 1]",
        ),
        hard_check(
            "embezzle.increasing",
            all(b > a for a, b in zip(fidelities, fidelities[1:])),
            "fidelity strictly increases with the resource dimension",
            dims=dims,
        ),
    ]
    summary = {
        "target_dim": cfg.target_dim,
        "best_fidelity": max(fidelities),
        "best_resource_dim": dims[fidelities.index(max(fidelities))],
    }
    return finish(ctx, summary, checks, rows)
