# backend/audit/runner.py

"""
Audit runner.

Loads all audit checks and executes them.
This is the engine behind `gtlab audit`.
"""

import importlib
import logging
import pkgutil
from typing import List

from backend.audit.contracts import CheckResult
from backend.audit.registry import list_checks, run_checks

logger = logging.getLogger(__name__)


# ============================================================
# Load all checks dynamically
# ============================================================

def _load_all_checks():
    """
    Import every module inside backend.audit.checks

    This triggers register_check(...) calls.
    """
    import backend.audit.checks as checks_pkg

    for _, module_name, _ in pkgutil.iter_modules(checks_pkg.__path__):
        importlib.import_module(f"{checks_pkg.__name__}.{module_name}")


# ============================================================
# Public runner API
# ============================================================

def run_audit(seed: int = 0, quick: bool = False) -> List[CheckResult]:
    """
    Execute all registered audit checks (or the quick profile).
    """
    _load_all_checks()
    names = list_checks()
    logger.info("audit: %d check groups (%s)", len(names), "quick" if quick else "full")
    return run_checks(seed, names, quick=quick)
