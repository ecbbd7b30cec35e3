# cli/common.py

"""
Shared plumbing for the gtlab subcommands: flag tables, config merge,
form/witness loading and the run directory epilogue.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from backend.audit.contracts import CheckResult, exit_code
from backend.config_service import ExperimentConfig, load_config
from backend.errors import InvalidParameter, LabError
from backend.forms.tensor import BUILTIN_FORMS, FormTensor
from backend.lifting import WitnessSequence
from backend.reports.run_report import RunContext, start_run, write_run_report
from backend.seeding import STREAM_INSTANCE, rng_for

logger = logging.getLogger(__name__)

FORM_CELL = 0


def _int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> List[float]:
    out = []
    for v in text.split(","):
        v = v.strip()
        if not v:
            continue
        if "/" in v:
            num, den = v.split("/", 1)
            out.append(float(num) / float(den))
        else:
            out.append(float(v))
    return out


# dest -> (flag, argparse kwargs)
FLAGS = {
    "d": ("--d", dict(type=int, help="State dimension d")),
    "d_grid": ("--d-grid", dict(type=_int_list, help="Comma separated d values")),
    "t_squared": ("--t-squared", dict(type=_float_list, help="Comma separated t² values (a/b allowed)")),
    "figure_t_squared": ("--figure-t-squared", dict(type=_float_list, help="t² values of the figure panels")),
    "n": ("--n", dict(type=int, help="Left matrix size n")),
    "m": ("--m", dict(type=int, help="Right matrix size m")),
    "length": ("--length", dict(type=int, help="Witness length")),
    "eps": ("--eps", dict(type=float, help="Accuracy ε in (0, 1)")),
    "samples": ("--samples", dict(type=int, help="Monte Carlo samples")),
    "restarts": ("--restarts", dict(type=int, help="Random restarts")),
    "flavor": ("--flavor", dict(choices=["standard", "loose"], help="Constraint flavor")),
    "witness_path": ("--witness", dict(help="Witness JSON file")),
    "embezzle_dims": ("--dims", dict(type=_int_list, help="Comma separated resource dimensions")),
    "target_dim": ("--target-dim", dict(type=int, help="Dimension of the maximally entangled target")),
    "fixed_t": ("--fixed-t", dict(type=float, help="Pin every witness weight t_i")),
    "ht_d": ("--ht-d", dict(type=int, help="Override the Gaussian dimension of the ht check")),
    "jp_d": ("--jp-d", dict(type=int, help="Gaussian dimension of the jp check")),
    "jp_samples": ("--jp-samples", dict(type=int, help="Samples of the jp check")),
    "d_budget": ("--d-budget", dict(type=int, help="Largest lift dimension the pipeline may use")),
    "d_prime_budget": ("--d-prime-budget", dict(type=int, help="Largest Gaussian dimension d′")),
}


def add_flags(parser, *names, form: bool = False):
    if form:
        names = tuple(dict.fromkeys(names + ("n", "m")))
    for name in names:
        flag, kwargs = FLAGS[name]
        parser.add_argument(flag, dest=name, default=None, **kwargs)
    if form:
        parser.add_argument(
            "--form",
            dest="form_kind",
            choices=["scalar", "trace", "random"],
            default=None,
            help="Builtin form (ignored with --form-file)",
        )
        parser.add_argument("--form-file", dest="form_path", default=None, help="FormTensor JSON file")


def config_from_args(args) -> ExperimentConfig:
    overrides = {name: getattr(args, name, None) for name in FLAGS}
    overrides["command"] = args.command
    overrides["seed"] = getattr(args, "seed", None)
    overrides["output_dir"] = getattr(args, "output_dir", None)
    if getattr(args, "progress", False):
        overrides["progress"] = True

    kind = getattr(args, "form_kind", None)
    path = getattr(args, "form_path", None)
    if path:
        overrides["form"] = {"kind": "file", "path": path}
    elif kind:
        overrides["form"] = {"kind": kind, "path": None}

    return load_config(getattr(args, "config", None), overrides)


# ============================================================
# Inputs
# ============================================================

def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).expanduser().read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidParameter("ERR_INPUT_MISSING", {"path": str(path)})
    except json.JSONDecodeError as e:
        raise InvalidParameter("ERR_INPUT_INVALID", {"path": str(path), "error": str(e)})


def _parse(path, parse):
    try:
        return parse(_read_json(path))
    except LabError:
        raise
    except ValueError as e:
        raise InvalidParameter("ERR_INPUT_INVALID", {"path": str(path), "error": str(e)})


def load_form(cfg: ExperimentConfig) -> FormTensor:
    if cfg.form.kind == "file":
        if not cfg.form.path:
            raise InvalidParameter("ERR_FORM_PATH_MISSING", {})
        return _parse(cfg.form.path, FormTensor.from_dict)
    rng = rng_for(cfg.seed, STREAM_INSTANCE, FORM_CELL)
    return BUILTIN_FORMS[cfg.form.kind](cfg.n, cfg.m, rng)


def load_witness(cfg: ExperimentConfig) -> Optional[WitnessSequence]:
    if not cfg.witness_path:
        return None
    return _parse(cfg.witness_path, WitnessSequence.from_dict)


def input_files(cfg: ExperimentConfig) -> List[str]:
    files = []
    if cfg.form.kind == "file" and cfg.form.path:
        files.append(cfg.form.path)
    if cfg.witness_path:
        files.append(cfg.witness_path)
    for path in files:
        if not Path(path).expanduser().is_file():
            raise InvalidParameter("ERR_INPUT_MISSING", {"path": str(path)})
    return files


# ============================================================
# Epilogue
# ============================================================

@dataclass
class CommandResult:
    path: str
    report: dict
    exit_code: int


def begin(cfg: ExperimentConfig) -> RunContext:
    return start_run(cfg.command, cfg, input_files(cfg))


def finish(
    ctx: RunContext,
    summary: dict,
    checks: List[CheckResult],
    rows: Optional[List[dict]] = None,
    warnings: Optional[list] = None,
) -> CommandResult:
    for c in checks:
        if c.severity == "FAIL":
            logger.error("check %s failed: %s", c.id, c.message)
        elif c.severity == "WARN":
            logger.warning("monitor %s: %s", c.id, c.message)
    path, report = write_run_report(ctx, summary, checks, rows, warnings)
    return CommandResult(path=path, report=report, exit_code=exit_code(checks))
