# backend/errors.py

from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass(eq=False)
class LabError(ValueError):
    """
    Base error for every rejected input or violated precondition.

    Carries an i18n message key plus the parameters needed to render it,
    so the CLI can localize and reports can store it as JSON.
    """

    key: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        super().__init__(f"{self.key}: {self.params}")

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "key": self.key,
            "params": self.params,
        }


class InvalidParameter(LabError):
    pass


class DimensionMismatch(LabError):
    pass


class NonFiniteInput(LabError):
    pass


class PreconditionViolation(LabError):
    """Raised with the measured quantities that broke the precondition."""


class ExportError(LabError):
    pass


def require_positive_int(value, name: str) -> int:
    if int(value) != value or value < 1:
        raise InvalidParameter("ERR_POSITIVE_INT", {"name": name, "value": value})
    return int(value)


def require_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise InvalidParameter("ERR_POSITIVE_REAL", {"name": name, "value": value})
    return value
