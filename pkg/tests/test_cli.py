"""Command-line interface: exit codes, JSON/CSV output, config plumbing."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from clone_sim.cli import main

FIVE_SIXTHS = 5.0 / 6.0


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ----------------------------------------------------------------- run


def test_run_default_input_reports_five_sixths(capsys):
    code, out, err = run_cli(capsys, "run", "--theta", "0", "--phi", "0")
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert payload["fidelity_squid2"] == 0.833333333333  # 12 significant digits
    assert payload["fidelity_squid3"] == 0.833333333333
    assert payload["target_overlap"] == 1.0
    assert payload["passed"] is True
    assert payload["seed"] == 20210
    assert payload["input"]["theta"] == 0.0
    assert payload["leakage"] <= 1e-10


def test_run_accepts_amplitudes_instead_of_angles(capsys):
    code, out, _ = run_cli(capsys, "run", "--alpha", "1", "--beta", "0")
    assert code == 0
    payload = json.loads(out)
    assert payload["input"]["theta"] is None
    assert payload["input"]["alpha"] == [1.0, 0.0]
    assert payload["fidelity_squid2"] == 0.833333333333


def test_run_normalizes_amplitude_input(capsys):
    code, out, _ = run_cli(capsys, "run", "--alpha", "3,0", "--beta", "0,4")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["input"]["alpha"][0] - 0.6) < 1e-12
    assert abs(payload["input"]["beta"][1] - 0.8) < 1e-12


def test_run_writes_trace_file(tmp_path, capsys):
    path = tmp_path / "trace.json"
    code, _, _ = run_cli(capsys, "run", "--alpha", "1", "--beta", "0",
                         "--trace", str(path))
    assert code == 0
    entries = json.loads(path.read_text())
    labels = [entry["label"] for entry in entries]
    assert labels == ["input"] + [f"step{k}" for k in range(1, 11)]
    dim = len(entries[0]["state"]["amplitudes"])
    assert dim == 81


def test_run_tiny_jitter_trips_the_tolerance_gate(capsys):
    # perturbation too small to leak photons but large enough to miss 5/6
    code, out, err = run_cli(capsys, "run", "--theta", "0.4", "--phi", "0.2",
                             "--timing-jitter", "1e-8", "--seed", "5")
    assert code == 1
    payload = json.loads(out)
    assert payload["passed"] is False
    assert payload["leakage"] <= 1e-10
    assert abs(payload["fidelity_squid2"] - FIVE_SIXTHS) > 1e-9


def test_run_large_jitter_exits_with_physics_code(capsys):
    code, out, err = run_cli(capsys, "run", "--theta", "1.1", "--phi", "0.3",
                             "--timing-jitter", "0.05", "--seed", "3")
    assert code == 3
    assert "leakage" in err
    assert json.loads(out)["passed"] is False


# ----------------------------------------------------------------- trace


def test_trace_command_prints_full_history(capsys):
    code, out, _ = run_cli(capsys, "trace", "--theta", "0.3", "--phi", "0.9")
    assert code == 0
    entries = json.loads(out)
    assert len(entries) == 11
    assert entries[0]["t_elapsed"] == 0.0
    assert entries[-1]["label"] == "step10"


# ----------------------------------------------------------------- sweep


def test_sweep_emits_csv_rows(capsys):
    code, out, _ = run_cli(capsys, "sweep", "-n", "6", "--seed", "7")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "sample,theta,phi,f2,f3,target_overlap,leakage"
    assert len(lines) == 7
    for line in lines[1:]:
        f2 = float(line.split(",")[3])
        assert abs(f2 - FIVE_SIXTHS) < 1e-9


def test_sweep_output_is_bit_identical_across_invocations(capsys):
    _, first, _ = run_cli(capsys, "sweep", "-n", "9", "--seed", "123")
    _, second, _ = run_cli(capsys, "sweep", "-n", "9", "--seed", "123")
    _, threaded, _ = run_cli(capsys, "sweep", "-n", "9", "--seed", "123", "--jobs", "4")
    assert first == second == threaded


def test_sweep_single_sample_matches_run_for_the_same_input(capsys):
    _, csv_out, _ = run_cli(capsys, "sweep", "-n", "1", "--seed", "55")
    row = csv_out.strip().split("\n")[1].split(",")
    rng = np.random.default_rng(55)
    theta = float(np.arccos(1.0 - 2.0 * rng.random(1))[0])
    phi = 2.0 * math.pi * float(rng.random(1)[0])
    _, run_out, _ = run_cli(capsys, "run", "--theta", repr(theta), "--phi", repr(phi))
    payload = json.loads(run_out)
    assert float(row[1]) == float(f"{theta:.12g}")
    assert float(row[3]) == payload["fidelity_squid2"]
    assert float(row[4]) == payload["fidelity_squid3"]
    assert float(row[6]) == payload["leakage"]


def test_sweep_summary_file(tmp_path, capsys):
    path = tmp_path / "summary.json"
    code, _, _ = run_cli(capsys, "sweep", "-n", "5", "--seed", "11",
                         "--summary", str(path))
    assert code == 0
    summary = json.loads(path.read_text())
    assert summary["n"] == 5 and summary["seed"] == 11
    assert summary["variance"] < 1e-18


def test_sweep_with_jitter_reports_without_asserting(capsys):
    code, out, _ = run_cli(capsys, "sweep", "-n", "3", "--seed", "7",
                           "--timing-jitter", "0.01")
    assert code == 0  # degraded numbers are data, not failures
    for line in out.strip().split("\n")[1:]:
        fields = line.split(",")
        assert abs(float(fields[3]) - FIVE_SIXTHS) > 1e-6
        assert float(fields[6]) > 1e-10


# ----------------------------------------------------------------- validate


def test_validate_passes_and_verbose_lists_every_check(capsys):
    code, out, _ = run_cli(capsys, "validate")
    assert code == 0
    assert out.strip() == "13/13 checks passed"
    code, out, _ = run_cli(capsys, "validate", "--verbose")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 14  # 13 checks plus the tally
    assert all("PASS" in line for line in lines[:-1])


# ------------------------------------------------------------ configuration


def test_config_file_supplies_defaults_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("theta = 0.25  # polar angle\nphi = 1.5\nseed = 77\n")
    _, out, _ = run_cli(capsys, "run", "--config", str(cfg))
    payload = json.loads(out)
    assert payload["input"]["theta"] == 0.25
    assert payload["seed"] == 77
    _, out, _ = run_cli(capsys, "run", "--config", str(cfg), "--theta", "0.5")
    assert json.loads(out)["input"]["theta"] == 0.5


def test_config_file_found_through_environment(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "env.cfg"
    cfg.write_text("seed = 4242\n")
    monkeypatch.setenv("CLONE_SIM_CONFIG", str(cfg))
    _, out, _ = run_cli(capsys, "run", "--theta", "0", "--phi", "0")
    assert json.loads(out)["seed"] == 4242


@pytest.mark.parametrize("content", [
    "volume = 11\n",           # unknown key
    "lambda 0.5\n",            # missing equals sign
    "lambda = 0\n",            # rate must be positive
    "timing_jitter = 1.5\n",   # outside [0, 1)
    "tolerance = 0\n",
    "fock_cutoff = 0\n",
    "jobs = 0\n",
    "num_samples = 0\n",
])
def test_bad_config_files_exit_with_code_two(tmp_path, capsys, content):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(content)
    code, _, err = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 2
    assert err.startswith("config error:")


def test_missing_config_file_exits_with_code_two(capsys):
    code, _, err = run_cli(capsys, "run", "--config", "/nonexistent/sim.cfg")
    assert code == 2 and "cannot read" in err


@pytest.mark.parametrize("argv", [
    ("run", "--theta", "0.1", "--alpha", "1", "--beta", "0"),  # two input styles
    ("run", "--alpha", "1"),                                   # beta missing
    ("run", "--alpha", "0", "--beta", "0"),                    # zero vector
    ("run", "--alpha", "one", "--beta", "0"),                  # unparseable
    ("run", "--timing-jitter", "-0.1"),
])
def test_inconsistent_flags_exit_with_code_two(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert err.startswith("config error:")


def test_unknown_flag_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["run", "--frequency", "9"])
    assert info.value.code == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "clone_sim.cli", "run", "--theta", "0", "--phi", "0"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True
