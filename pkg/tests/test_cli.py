"""CLI surface: subcommands, flags, config files, exit codes, outputs."""
import json

from cskit.cli import EXIT_BAD_CONFIG, EXIT_CENSORED, EXIT_OK, main
from cskit.harness import load_record


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_coherence_dft(capsys):
    code, out, _ = run_cli(capsys, "coherence", "--system", "dft", "--n", "128")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert abs(payload["mu"] - 1.0) <= 1e-8


def test_spectrum_csv(capsys, tmp_path):
    path = tmp_path / "spec.csv"
    code, _, _ = run_cli(capsys, "spectrum", "--n", "64", "--scale", "1",
                         "--wavelet", "daub8", "--out", str(path))
    assert code == EXIT_OK
    lines = path.read_text().splitlines()
    assert lines[0] == "omega,magnitude"
    assert len(lines) == 65
    float(lines[1].split(",")[1])  # parses


def test_recover_single_instance(capsys):
    code, out, _ = run_cli(capsys, "recover", "--system", "dft", "--n", "64",
                           "--sparsity", "4", "--m", "24", "--seed", "3")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["result"]["exact"] is True
    assert payload["result"]["constraint_residual"] <= 1e-8


def test_certify_single_instance(capsys):
    code, out, _ = run_cli(capsys, "certify", "--system", "dft", "--n", "64",
                           "--sparsity", "4", "--m", "32", "--seed", "1")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert {"certificate", "recovery", "consistent"} <= set(payload)


def test_missing_m_is_config_error(capsys):
    code, _, err = run_cli(capsys, "recover", "--system", "dft", "--n", "32",
                           "--sparsity", "2")
    assert code == EXIT_BAD_CONFIG
    assert "error" in err


def test_bad_cells_is_config_error(capsys):
    code, _, _ = run_cli(capsys, "table1", "--cells", "1:banana")
    assert code == EXIT_BAD_CONFIG


def test_bad_config_file_field(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trials": 0}))
    code, _, _ = run_cli(capsys, "phase", "--config", str(cfg),
                         "--m-grid", "4,8")
    assert code == EXIT_BAD_CONFIG


def test_censored_search_exit_code(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 256, "m_search": {"hi": 9},
                               "cells": [[1, 8]], "trials": 8}))
    code, _, _ = run_cli(capsys, "table1", "--config", str(cfg), "--seed", "2")
    assert code == EXIT_CENSORED


def test_table1_small_search(capsys, tmp_path):
    out_path = tmp_path / "t1.json"
    code, _, err = run_cli(capsys, "table1", "--n", "256", "--cells", "1:3",
                           "--trials", "10", "--seed", "4", "--format", "json",
                           "--out", str(out_path))
    assert code == EXIT_OK
    rec = json.loads(out_path.read_text())
    assert rec["aggregates"]["cells"][0]["M"] is not None
    assert "M=" in err


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": "dft", "n": 64}))
    code, out, _ = run_cli(capsys, "coherence", "--config", str(cfg),
                           "--n", "32")
    assert code == EXIT_OK
    assert json.loads(out)["n"] == 32  # flag wins over file


def test_solver_gap_flag_reaches_config(capsys):
    code, out, _ = run_cli(capsys, "recover", "--system", "dft", "--n", "32",
                           "--sparsity", "2", "--m", "16", "--seed", "0",
                           "--solver-gap", "1e-6")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["config"]["solver"]["duality_gap_tol"] == 1e-6


def test_phase_csv_deterministic(capsys, tmp_path):
    args = ["phase", "--system", "dft", "--n", "64", "--sparsity", "3",
            "--m-grid", "8,24", "--trials", "6", "--seed", "5"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(capsys, *args, "--out", str(p1))[0] == EXIT_OK
    assert run_cli(capsys, *args, "--out", str(p2))[0] == EXIT_OK
    assert p1.read_text() == p2.read_text()


def test_noiselet_json_record_loads(capsys, tmp_path):
    path = tmp_path / "noise.json"
    code, _, _ = run_cli(capsys, "noiselet", "--n", "64", "--sparsity", "3",
                         "--m", "24", "--trials", "4", "--seed", "9",
                         "--format", "json", "--out", str(path))
    assert code == EXIT_OK
    loaded = load_record(path)
    assert loaded["aggregates"]["n_trials"] == 4


def test_deviation_csv(capsys):
    code, out, _ = run_cli(capsys, "deviation", "--n", "128", "--sparsity",
                           "5", "--m", "128", "--trials", "5", "--seed", "0")
    assert code == EXIT_OK
    header, row = out.splitlines()
    assert header == "n,system,S,m,trials,frequency"
    assert row.endswith("0.0")


def test_certify_batch(capsys, tmp_path):
    path = tmp_path / "batch.json"
    code, _, _ = run_cli(capsys, "certify", "--batch", "--system", "dft",
                         "--n", "64", "--sparsity", "4", "--m", "32",
                         "--trials", "5", "--seed", "2", "--format", "json",
                         "--out", str(path))
    assert code == EXIT_OK
    rec = json.loads(path.read_text())
    assert rec["aggregates"]["consistent"] is True
