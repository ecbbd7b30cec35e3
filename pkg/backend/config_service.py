"""
config_service.py

Grothendieck lab — Configuration Backbone

Single source of truth for experiment configuration.

RULE:
No other module should read a config file directly.
Always import from config_service.

Precedence: DEFAULT_CONFIG < --config file < command-line flags.
The merged result is validated into an ExperimentConfig; its JSON dump
(config.json in every run directory) reproduces the run.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from backend.errors import InvalidParameter

# --------------------------------------------------
# DEFAULT CONFIG (schema seed)
# --------------------------------------------------

DEFAULT_CONFIG = {
    "command": "",
    "d": 8,
    "d_grid": [1, 2, 4, 8, 16, 32, 64],
    "t_squared": [0.1, 1 / 3, 0.5, 1.0, 2.4, 3.0, 10.0],
    "figure_t_squared": [3.0, 2.4],
    "n": 2,
    "m": 2,
    "length": 2,
    "eps": 0.5,
    "samples": 200,
    "restarts": 8,
    "seed": 0,
    "output_dir": None,
    "flavor": "standard",
    "form": {"kind": "trace", "path": None},
    "witness_path": None,
    "embezzle_dims": [16, 32, 64, 128, 256, 512, 1024, 2048, 4096],
    "target_dim": 2,
    "fixed_t": None,
    "ht_d": None,
    "jp_d": 64,
    "jp_samples": 500,
    "d_budget": 256,
    "d_prime_budget": 32,
    "gaussian_max_dim": 16,
    "monitor_ratio": 0.4,
    "progress": False,
    "tolerances": {
        "feasibility": 1e-10,
        "identity_rtol": 1e-10,
        "line_sums": 1e-12,
        "psd": 1e-10,
        "certificate": 1e-9,
        "sigmas": 3.0,
    },
}


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    feasibility: float = Field(1e-10, gt=0)
    identity_rtol: float = Field(1e-10, gt=0)
    line_sums: float = Field(1e-12, gt=0)
    psd: float = Field(1e-10, gt=0)
    certificate: float = Field(1e-9, gt=0)
    sigmas: float = Field(3.0, gt=0)


class FormSource(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["scalar", "trace", "random", "file"] = "trace"
    path: Optional[str] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str = ""
    d: int = Field(8, ge=1)
    d_grid: List[int] = Field(default_factory=lambda: list(DEFAULT_CONFIG["d_grid"]))
    t_squared: List[float] = Field(default_factory=lambda: list(DEFAULT_CONFIG["t_squared"]))
    figure_t_squared: List[float] = Field(default_factory=lambda: [3.0, 2.4])
    n: int = Field(2, ge=1)
    m: int = Field(2, ge=1)
    length: int = Field(2, ge=1)
    eps: float = Field(0.5, gt=0, lt=1)
    samples: int = Field(200, ge=1)
    restarts: int = Field(8, ge=1)
    seed: int = Field(0, ge=0)
    output_dir: Optional[str] = None
    flavor: Literal["standard", "loose"] = "standard"
    form: FormSource = Field(default_factory=FormSource)
    witness_path: Optional[str] = None
    embezzle_dims: List[int] = Field(default_factory=lambda: list(DEFAULT_CONFIG["embezzle_dims"]))
    target_dim: int = Field(2, ge=1)
    fixed_t: Optional[float] = Field(None, gt=0)
    ht_d: Optional[int] = Field(None, ge=1)
    jp_d: Optional[int] = Field(64, ge=1)
    jp_samples: int = Field(500, ge=1)
    d_budget: int = Field(256, ge=1)
    d_prime_budget: int = Field(32, ge=1)
    gaussian_max_dim: int = Field(16, ge=1)
    monitor_ratio: float = Field(0.4, ge=0)
    progress: bool = False
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @field_validator("d_grid", "embezzle_dims")
    @classmethod
    def _positive_ints(cls, v):
        if any(x < 1 for x in v):
            raise ValueError("dimensions must be positive")
        return v

    @field_validator("t_squared", "figure_t_squared")
    @classmethod
    def _positive_reals(cls, v):
        if any(x <= 0 for x in v):
            raise ValueError("t² values must be positive")
        return v

    def to_json(self) -> dict:
        return self.model_dump(mode="json")


# --------------------------------------------------
# INTERNAL HELPERS
# --------------------------------------------------

def _deep_merge(default: dict, user: dict) -> dict:
    """
    Recursively merge user config over defaults.
    Missing keys fall back to defaults.
    """
    result = default.copy()

    for key, value in user.items():
        if (
            key in result
            and isinstance(result[key], dict)
            and isinstance(value, dict)
        ):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value

    return result


def _read_file(path) -> dict:
    path = Path(path).expanduser()
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidParameter("ERR_CONFIG_MISSING", {"path": str(path)})
    except json.JSONDecodeError as e:
        raise InvalidParameter("ERR_CONFIG_INVALID", {"path": str(path), "error": str(e)})
    if not isinstance(data, dict):
        raise InvalidParameter("ERR_CONFIG_INVALID", {"path": str(path), "error": "not an object"})
    return data


# --------------------------------------------------
# PUBLIC API
# --------------------------------------------------

def load_config(path=None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """
    Merge defaults, an optional JSON config file and CLI overrides.

    Override values of None mean "flag not given" and are ignored.
    """
    merged = DEFAULT_CONFIG
    if path:
        merged = _deep_merge(merged, _read_file(path))
    if overrides:
        given = {k: v for k, v in overrides.items() if v is not None}
        merged = _deep_merge(merged, given)

    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise InvalidParameter(
            "ERR_CONFIG_INVALID",
            {"path": str(path) if path else None, "error": str(e)},
        )


def save_config(cfg: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(cfg.to_json(), indent=2, ensure_ascii=False),
        encoding="utf-8",
    )
    return path
