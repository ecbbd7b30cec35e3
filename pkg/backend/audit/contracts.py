# backend/audit/contracts.py

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Literal

Severity = Literal["PASS", "WARN", "FAIL"]


@dataclass
class CheckResult:
    """
    One verified inequality or identity.

    Hard checks report FAIL when they do not hold; monitors report WARN
    and never change the exit code.
    """

    id: str
    severity: Severity
    message: str
    hard: bool = True
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "severity": self.severity,
            "message": self.message,
            "hard": self.hard,
            "data": self.data,
        }


def hard_check(id: str, ok: bool, message: str, **data) -> CheckResult:
    return CheckResult(id, "PASS" if ok else "FAIL", message, True, data)


def monitor(id: str, ok: bool, message: str, **data) -> CheckResult:
    return CheckResult(id, "PASS" if ok else "WARN", message, False, data)


def summarize(results: Iterable[CheckResult]) -> Dict[str, int]:
    results = list(results)
    return {
        "total_checks": len(results),
        "passed": sum(1 for r in results if r.severity == "PASS"),
        "warnings": sum(1 for r in results if r.severity == "WARN"),
        "failed": sum(1 for r in results if r.severity == "FAIL"),
    }


def exit_code(results: List[CheckResult]) -> int:
    return 1 if any(r.severity == "FAIL" for r in results) else 0
