import json

import numpy as np
import pytest

from spde_sdk.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, build_parser, main
from spde_sdk.config import SEED_ENV
from spde_sdk.solver import DRIFTS, Drift, register_drift

SMALL = ["--T", "0.5", "--modes", "4,8", "--taus", "1/8,1/16", "--samples", "3", "--seed", "7"]


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


def test_mesh_dump(tmp_path):
    out = tmp_path / "mesh.csv"
    assert main(["mesh-dump", "--steps", "16", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "n,t_n,tau_n"
    assert lines[17].startswith("16,0.5,")
    assert (tmp_path / "mesh.csv.meta.json").exists()


def test_solve_writes_every_artifact(tmp_path):
    out = tmp_path / "u.csv"
    assert main(["solve", *SMALL, "--trajectory", "--sample-index", "2", "--out", str(out)]) == EXIT_OK
    assert out.read_text().startswith("k,coeff\n")
    assert (tmp_path / "u.nodal.csv").read_text().startswith("m,x_m,value\n")
    assert (tmp_path / "u.trajectory.csv").read_text().startswith("n,t_n,c1,")
    meta = json.loads((tmp_path / "u.csv.meta.json").read_text())
    assert meta["metadata"]["sample_index"] == 2


def test_invalid_input_exit_code(tmp_path):
    assert main(["solve", "--spectrum", "pink", "--out", str(tmp_path / "u.csv")]) == EXIT_INVALID
    assert main(["solve", "--gamma", "0.3", "--out", str(tmp_path / "u.csv")]) == EXIT_INVALID
    assert main(["solve", "--config", str(tmp_path / "absent.cfg")]) == EXIT_INVALID
    with pytest.raises(SystemExit) as info:
        main(["solve", "--no-such-flag"])
    assert info.value.code == EXIT_INVALID


def _explode(u):
    return np.where(np.abs(u) > 0.5, np.inf, 0.0)


def test_numeric_failure_exit_code(tmp_path):
    register_drift(Drift("explode-test", _explode, 0.0, "infinite away from zero"))
    try:
        code = main(["solve", *SMALL, "--drift", "explode-test", "--out", str(tmp_path / "u.csv")])
    finally:
        DRIFTS.pop("explode-test", None)
    assert code == EXIT_NUMERIC
    assert not (tmp_path / "u.csv").exists()


def test_converge_space_is_independent_of_workers(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["converge-space", *SMALL, "--workers", "1", "--out", str(a)]) == EXIT_OK
    assert main(["converge-space", *SMALL, "--workers", "2", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_seed_from_environment(tmp_path, monkeypatch):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    args = ["converge-time", "--T", "0.5", "--taus", "1/8,1/16", "--samples", "2"]
    monkeypatch.setenv(SEED_ENV, "11")
    assert main([*args, "--out", str(a)]) == EXIT_OK
    assert main([*args, "--seed", "11", "--out", str(b)]) == EXIT_OK
    assert main([*args, "--seed", "12", "--out", str(c)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_ledger_records_every_output(tmp_path):
    ledger = tmp_path / "runs.jsonl"
    common = [*SMALL, "--ledger", str(ledger)]
    assert main(["mesh-dump", *common, "--out", str(tmp_path / "mesh.csv")]) == EXIT_OK
    assert main(["solve", *common, "--out", str(tmp_path / "u.csv")]) == EXIT_OK
    entries = [json.loads(line) for line in ledger.read_text().splitlines()]
    assert [e["entry_type"] for e in entries] == ["mesh", "solve"]
    assert entries[0]["fingerprint"] == entries[1]["fingerprint"]


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("modes = 4, 8\nsamples = 2\nT = 0.25\n")
    out = tmp_path / "mesh.csv"
    assert main(["mesh-dump", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    meta = json.loads((tmp_path / "mesh.csv.meta.json").read_text())
    assert meta["metadata"]["config"]["T"] == 0.25


def test_parser_lists_every_command():
    parser = build_parser()
    for command in ("solve", "converge-space", "converge-time", "diagnose-noise",
                    "diagnose-solution", "mesh-dump"):
        assert parser.parse_args([command]).command == command


def _reports_by_name(stem):
    reports = {}
    for path in sorted(stem.parent.glob(stem.name + ".[0-9][0-9].csv")):
        footer = dict(line[2:].split("=", 1) for line in path.read_text().splitlines()
                      if line.startswith("# "))
        reports[footer["name"].split("[")[0]] = footer
    return reports


def _light_noise_config(tmp_path, spectrum):
    cfg = tmp_path / "probe.cfg"
    cfg.write_text(f"spectrum = {spectrum}\nprobe_modes = 4096\nprobe_blocks = 8\nprobe_levels = 8\n")
    return str(cfg)


def test_diagnose_noise_uses_the_full_ito_sample_count(tmp_path):
    out = tmp_path / "noise.csv"
    assert main(["diagnose-noise", "--config", _light_noise_config(tmp_path, "white"),
                 "--out", str(out)]) == EXIT_OK
    reports = _reports_by_name(tmp_path / "noise")
    assert reports["ito_isometry"]["passed"] == "true"
    assert "besov_sobolev_contrast" in reports
    meta = json.loads((tmp_path / "noise.00.csv.meta.json").read_text())
    assert meta["metadata"]["config"]["ito_samples"] == 10_000


def test_diagnose_noise_skips_the_contrast_for_trace_class_noise(tmp_path):
    out = tmp_path / "noise.csv"
    assert main(["diagnose-noise", "--config", _light_noise_config(tmp_path, "trace:1.1"),
                 "--out", str(out)]) == EXIT_OK
    reports = _reports_by_name(tmp_path / "noise")
    assert "besov_sobolev_contrast" not in reports
    assert set(reports) == {"assumption3", "sharpness", "ito_isometry", "inverse_inequality"}
    assert "besov_sobolev_contrast" not in (tmp_path / "noise.summary.txt").read_text()
