import json
from pathlib import Path

import pytest

from backend.forms.tensor import scalar_form
from cli.main import build_parser, main


def _report(capsys) -> dict:
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.strip().endswith("report.json"))
    return json.loads(Path(line.split(": ", 1)[1].strip()).read_text(encoding="utf-8"))


def test_parser_lists_every_family():
    text = build_parser().format_help()
    for command in ("figure1", "lines", "embezzle", "os-search", "norms", "lift", "pipeline", "montecarlo", "audit"):
        assert command in text


def test_figure1_writes_heatmaps(tmp_path, capsys):
    code = main(["--output-dir", str(tmp_path), "--quiet", "figure1", "--d", "8"])
    assert code == 0
    report = _report(capsys)
    assert report["command"] == "figure1"
    assert report["summary"]["checks"]["failed"] == 0
    run_dir = next(tmp_path.iterdir())
    assert (run_dir / "line_d8_t2_3.pgm").exists()
    assert (run_dir / "line_d8_t2_2.4.csv").exists()
    assert (run_dir / "config.json").exists()


def test_embezzle_rows(tmp_path, capsys):
    code = main(["--output-dir", str(tmp_path), "--quiet", "embezzle", "--dims", "16,64,256", "--target-dim", "2"])
    assert code == 0
    report = _report(capsys)
    assert [r["resource_dim"] for r in report["rows"]] == [16, 64, 256]
    assert report["summary"]["best_resource_dim"] == 256


def test_seed_flag_lands_in_config(tmp_path, capsys):
    main(["--output-dir", str(tmp_path), "--seed", "11", "--quiet", "embezzle", "--dims", "2"])
    assert _report(capsys)["config"]["seed"] == 11


def test_bad_config_exits_with_usage_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps": 3.0}), encoding="utf-8")
    code = main(["--config", str(cfg), "--output-dir", str(tmp_path), "embezzle"])
    assert code == 2
    assert capsys.readouterr().err


def test_missing_form_file(tmp_path, capsys):
    code = main(["--output-dir", str(tmp_path), "os-search", "--form-file", str(tmp_path / "none.json")])
    assert code == 2


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_os_search_on_a_form_file(tmp_path, capsys):
    form = tmp_path / "form.json"
    form.write_text(json.dumps(scalar_form().to_dict()), encoding="utf-8")
    code = main([
        "--output-dir", str(tmp_path / "runs"), "--quiet",
        "os-search", "--form-file", str(form), "--length", "1", "--restarts", "2",
    ])
    assert code == 0
    report = _report(capsys)
    assert report["summary"]["form"]["source"] == "file"
    assert report["summary"]["os"] >= report["summary"]["nc"] - 1e-9
    assert "witness.json" in report["artifacts"]


def test_config_sigmas_reach_montecarlo_rows(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tolerances": {"sigmas": 5.0}}), encoding="utf-8")
    main([
        "--config", str(cfg), "--output-dir", str(tmp_path / "runs"), "--quiet",
        "montecarlo", "--form", "scalar", "--length", "1",
        "--samples", "5", "--ht-d", "4", "--jp-d", "4", "--jp-samples", "5",
    ])
    rows = _report(capsys)["rows"]
    ht_rows = [r for r in rows if r["check"].startswith("ht")]
    assert ht_rows and all(r["sigmas"] == 5.0 for r in ht_rows)


def _check(report: dict, check_id: str) -> dict:
    return next(c for c in report["checks"] if c["id"] == check_id)


@pytest.mark.slow
@pytest.mark.parametrize("form", ["scalar", "trace"])
def test_pipeline_runs_and_records_caps(form, tmp_path, capsys):
    code = main([
        "--output-dir", str(tmp_path), "--quiet",
        "pipeline", "--form", form, "--n", "2", "--m", "2", "--length", "2",
        "--restarts", "2", "--samples", "20", "--d-budget", "2", "--d-prime-budget", "4",
    ])
    assert code == 0
    report = _report(capsys)
    assert report["summary"]["checks"]["failed"] == 0

    ratio = _check(report, "pipeline.phi_vs_os")
    assert ratio["hard"] is False
    assert "0.4" in ratio["message"]
    if form == "scalar":
        assert ratio["severity"] == "PASS"

    schedule = next(r for r in report["rows"] if r.get("stage") == "schedule")
    assert schedule["d"] <= 2
    assert ("WARN_PIPELINE_D_CAPPED" in report["warnings"]) == (schedule["d_required"] > 2)
    assert "WARN_PIPELINE_D_PRIME_CAPPED" in report["warnings"]
