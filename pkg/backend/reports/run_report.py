# backend/reports/run_report.py

"""
Run directories.

Every command writes one directory under the output root:

    <command>_<UTC timestamp>_<input hash[:8]>/
        config.json     the merged ExperimentConfig (replays the run)
        report.json     {version, command, run, config, input_hash,
                         summary, checks, rows, warnings}
        report.csv      the rows, one per line
        ...             command artifacts (PGM / CSV heatmaps)
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

import numpy as np

from backend.audit.contracts import CheckResult, summarize
from backend.config_service import ExperimentConfig, save_config
from backend.errors import ExportError
from backend.hashing import input_hash
from backend.paths import ensure_dir, output_root

logger = logging.getLogger(__name__)

REPORT_VERSION = 1


def utcnow():
    return datetime.now(timezone.utc).isoformat()


def generate_run_id():
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")


def to_jsonable(value):
    """json.dump default= hook for numpy values and complex numbers."""
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


@dataclass
class RunContext:
    command: str
    config: ExperimentConfig
    input_hash: str
    run_id: str
    started_at: str
    path: Path
    artifacts: List[str] = field(default_factory=list)

    def artifact(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.path / name


def start_run(command: str, cfg: ExperimentConfig, input_files=()) -> RunContext:
    """Create the run directory and write config.json."""
    config = cfg.to_json()
    digest = input_hash(config, input_files)
    run_id = generate_run_id()
    root = output_root(cfg.output_dir)
    path = Path(root) / f"{command}_{run_id}_{digest[:8]}"
    suffix = 1
    while path.exists():
        suffix += 1
        path = Path(root) / f"{command}_{run_id}_{digest[:8]}_{suffix}"
    try:
        ensure_dir(path)
        save_config(cfg, path / "config.json")
    except OSError as e:
        raise ExportError("ERR_EXPORT_IO", {"path": str(path), "error": str(e)})

    logger.info("run %s -> %s", command, path)
    return RunContext(
        command=command,
        config=cfg,
        input_hash=digest,
        run_id=run_id,
        started_at=utcnow(),
        path=path,
    )


def _csv_cell(value):
    if isinstance(value, (dict, list, tuple, np.ndarray, complex)):
        return json.dumps(value, default=to_jsonable, sort_keys=True)
    return value


def write_rows_csv(rows: List[dict], path: Path) -> Path:
    fieldnames: List[str] = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return path


def write_run_report(
    ctx: RunContext,
    summary: dict,
    checks: List[CheckResult],
    rows: Optional[List[dict]] = None,
    warnings: Optional[list] = None,
):
    rows = rows or []
    report = {
        "version": REPORT_VERSION,
        "command": ctx.command,
        "run": {
            "run_id": ctx.run_id,
            "started_at": ctx.started_at,
            "finished_at": utcnow(),
        },
        "config": ctx.config.to_json(),
        "input_hash": ctx.input_hash,
        "summary": {**summary, "checks": summarize(checks)},
        "checks": [c.to_dict() for c in checks],
        "rows": rows,
        "artifacts": list(ctx.artifacts),
        "warnings": warnings or [],
    }

    path = ctx.path / "report.json"
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, default=to_jsonable)
        write_rows_csv(rows, ctx.path / "report.csv")
    except OSError as e:
        raise ExportError("ERR_EXPORT_IO", {"path": str(path), "error": str(e)})

    return str(path), report
