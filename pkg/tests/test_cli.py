"""Integration tests for CLI commands."""

import csv
import json
import os
import subprocess
import sys
from pathlib import Path

from typer.testing import CliRunner

from gldpc_cs import __version__
from gldpc_cs.cli import app
from gldpc_cs.harness import ERROR_HEADER, GRAPH_HEADER, RESULT_HEADER, SUMMARY_HEADER

runner = CliRunner()

SMALL_CONFIG = """\
n: 4096
k: 8
trials: 3
snr_db: [20, 30]
alphabet:
  mode: discrete
seeds:
  master: 7
"""


def run_cli(args, cwd=None):
    """Helper to run the gldpc-cs CLI in a subprocess."""
    cmd = [sys.executable, "-m", "gldpc_cs.cli"] + args
    env = os.environ.copy()
    src_dir = Path(__file__).parent.parent / "src"
    env["PYTHONPATH"] = str(src_dir) + os.pathsep + env.get("PYTHONPATH", "")
    return subprocess.run(
        cmd,
        cwd=cwd or Path.cwd(),
        capture_output=True,
        text=True,
        env=env,
    )


def _write_config(tmp_path, text=SMALL_CONFIG):
    path = tmp_path / "exp.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def _rows(path):
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


def test_cli_version():
    """--version prints the package version."""
    result = run_cli(["--version"])
    assert result.returncode == 0
    assert result.stdout.strip() == f"gldpc-cs v{__version__}"


def test_cli_run_prints_json_summary(tmp_path):
    """run prints one summary object per SNR point."""
    config = _write_config(tmp_path)
    result = run_cli(["run", "--config", str(config)])
    assert result.returncode == 0, result.stderr
    summary = json.loads(result.stdout)
    assert [row["snr_db"] for row in summary] == [20.0, 30.0]
    assert all(row["trials"] == 3 for row in summary)
    assert set(summary[0]) == set(SUMMARY_HEADER)
    assert "SNR" in result.stderr


def test_cli_run_overrides(tmp_path):
    """--trials and --snr-db replace config values."""
    config = _write_config(tmp_path)
    result = run_cli(["run", "--config", str(config), "--trials", "1", "--snr-db", "25"])
    assert result.returncode == 0, result.stderr
    summary = json.loads(result.stdout)
    assert len(summary) == 1
    assert summary[0]["snr_db"] == 25.0
    assert summary[0]["trials"] == 1


def test_cli_sweep_writes_records_and_summary(tmp_path):
    """sweep writes the per-trial CSV and a sibling summary CSV."""
    config = _write_config(tmp_path)
    out = tmp_path / "res.csv"
    result = runner.invoke(app, ["sweep", "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0
    rows = _rows(out)
    assert rows[0] == list(RESULT_HEADER)
    assert len(rows) == 1 + 2 * 3
    summary = _rows(tmp_path / "res.summary.csv")
    assert summary[0] == list(SUMMARY_HEADER)
    assert len(summary) == 3


def test_cli_sweep_several_sparsity_levels(tmp_path):
    """A list of k values sweeps each level and summarizes per (k, SNR)."""
    config = _write_config(tmp_path, SMALL_CONFIG.replace("k: 8", "k: [4, 8]"))
    out = tmp_path / "res.csv"
    result = runner.invoke(app, ["sweep", "--config", str(config), "--out", str(out), "--no-timing"])
    assert result.exit_code == 0
    rows = _rows(out)
    assert len(rows) == 1 + 2 * 2 * 3
    assert [row[3] for row in rows[1:]] == ["4"] * 6 + ["8"] * 6
    summary = _rows(tmp_path / "res.summary.csv")
    assert [(row[0], row[1]) for row in summary[1:]] == [("4", "20.0"), ("4", "30.0"), ("8", "20.0"), ("8", "30.0")]


def test_cli_sweep_no_timing_is_byte_identical(tmp_path):
    """Two --no-timing runs with the same seed produce identical files."""
    config = _write_config(tmp_path)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = runner.invoke(app, ["sweep", "--config", str(config), "--out", str(out), "--no-timing"])
        assert result.exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a.summary.csv").read_bytes() == (tmp_path / "b.summary.csv").read_bytes()


def test_cli_sweep_seed_changes_results(tmp_path):
    """--seed overrides the master seed."""
    config = _write_config(tmp_path)
    outputs = []
    for seed in ("1", "2"):
        out = tmp_path / f"seed{seed}.csv"
        result = runner.invoke(
            app, ["sweep", "--config", str(config), "--out", str(out), "--no-timing", "--seed", seed, "--snr-db", "0"]
        )
        assert result.exit_code == 0
        outputs.append(out.read_text(encoding="utf-8"))
    assert outputs[0] != outputs[1]


def test_cli_analyze_graph_stdout():
    """analyze-graph writes its census CSV to stdout."""
    result = run_cli(["analyze-graph", "--k", "20", "--seeds", "4"])
    assert result.returncode == 0, result.stderr
    rows = list(csv.reader(result.stdout.splitlines()))
    assert rows[0] == list(GRAPH_HEADER)
    assert len(rows) == 5
    assert all(row[2] == "60" for row in rows[1:])
    assert "graphs contain only tree or unicyclic components" in result.stderr


def test_cli_analyze_graph_file(tmp_path):
    """analyze-graph --out writes a file."""
    out = tmp_path / "graph.csv"
    result = runner.invoke(app, ["analyze-graph", "--k", "10", "--b", "120", "--seeds", "3", "--out", str(out)])
    assert result.exit_code == 0
    rows = _rows(out)
    assert len(rows) == 4
    assert rows[1][2] == "120"


def test_cli_analyze_graph_rejects_degree_above_bins():
    """d > b is an error."""
    result = run_cli(["analyze-graph", "--k", "1", "--b", "2", "--d", "3", "--seeds", "1"])
    assert result.returncode == 1
    assert "Error:" in result.stderr


def test_cli_analyze_errors(tmp_path):
    """analyze-errors writes one row per recovered node of the analysed trials."""
    config = _write_config(tmp_path, "n: 64\nk: 6\nb: 18\nc2: 32\ntrials: 10\nsnr_db: [30]\n")
    out = tmp_path / "errors.csv"
    result = run_cli(["analyze-errors", "--config", str(config), "--out", str(out)])
    assert result.returncode == 0, result.stderr
    rows = _rows(out)
    assert rows[0] == list(ERROR_HEADER)
    assert len(rows) > 1
    assert "excluded" in result.stderr


def test_cli_unknown_config_key(tmp_path):
    """Unknown keys exit 1 with an error and a hint."""
    config = _write_config(tmp_path, "n: 64\nk: 2\nbogus: 1\n")
    result = run_cli(["run", "--config", str(config)])
    assert result.returncode == 1
    assert "Error: Unknown config key(s): bogus" in result.stderr
    assert "Hint:" in result.stderr


def test_cli_missing_config_file(tmp_path):
    """A config path that does not exist is rejected before running."""
    result = run_cli(["run", "--config", str(tmp_path / "missing.yaml")])
    assert result.returncode != 0


def test_cli_unwritable_output(tmp_path):
    """Writing into a missing directory is an I/O error."""
    config = _write_config(tmp_path, "n: 64\nk: 2\ntrials: 1\nsnr_db: [30]\n")
    out = tmp_path / "missing" / "res.csv"
    result = run_cli(["sweep", "--config", str(config), "--out", str(out)])
    assert result.returncode == 1
    assert "I/O Error:" in result.stderr
