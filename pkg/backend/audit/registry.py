# backend/audit/registry.py

from typing import Callable, Dict, List

from .contracts import CheckResult

# fn(seed, quick) -> results; quick runs a reduced grid
AuditCheckFn = Callable[[int, bool], List[CheckResult]]

_REGISTRY: Dict[str, AuditCheckFn] = {}


def register_check(name: str, fn: AuditCheckFn):
    _REGISTRY[name] = fn


def list_checks() -> List[str]:
    return sorted(_REGISTRY.keys())


def run_checks(seed: int, checks: List[str], quick: bool = False) -> List[CheckResult]:
    results = []
    for name in checks:
        fn = _REGISTRY.get(name)
        if not fn:
            continue
        results.extend(fn(seed, quick))
    return results
