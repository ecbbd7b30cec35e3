# cli/audit_cli.py

from backend.audit.contracts import summarize
from backend.audit.runner import run_audit
from cli.common import begin, finish


def register_audit_subparser(subparsers):
    p = subparsers.add_parser(
        "audit",
        help="Run every registered invariant check",
    )
    p.add_argument(
        "--quick",
        action="store_true",
        help="Reduced grids (d ≤ 16, fewer random instances)",
    )
    p.set_defaults(func=cmd_audit)


def cmd_audit(cfg, quick: bool = False):
    ctx = begin(cfg)
    results = run_audit(seed=cfg.seed, quick=quick)
    rows = [
        {"id": r.id, "severity": r.severity, "hard": r.hard, "message": r.message}
        for r in results
    ]
    return finish(ctx, {"quick": quick, **summarize(results)}, results, rows)
