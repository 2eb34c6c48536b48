from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import typer

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .harness import (
    ERROR_HEADER,
    GRAPH_HEADER,
    analyze_errors,
    analyze_graph,
    csv_text,
    summary_path,
    sweep as run_sweep,
    write_error_csv,
    write_graph_csv,
    write_records_csv,
    write_summary_csv,
)

app = typer.Typer(add_completion=False, help="Generalized-LDPC compressive sensing experiments.")


def version_callback(value: bool):
    if value:
        typer.echo(f"gldpc-cs v{__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Optional[bool] = typer.Option(
        None, "--version", callback=version_callback, is_eager=True, help="Show version and exit"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log decoder and sweep details to stderr"),
):
    """
    Generalized-LDPC compressive sensing experiments.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load(config: Optional[Path], seed: Optional[int], trials: Optional[int], snr_db: Optional[str]) -> ExperimentConfig:
    return load_config(config, {"seeds.master": seed, "trials": trials, "snr_db": snr_db})


def _report(summary) -> None:
    for row in summary:
        mse = "n/a" if row.mean_relative_mse is None else f"{row.mean_relative_mse:.3e}"
        color = typer.colors.GREEN if row.support_error_rate == 0 else typer.colors.YELLOW
        typer.secho(
            f"k={row.k:<5d} SNR {row.snr_db:5.1f} dB: support error {row.support_error_rate:.3f} "
            f"(+/- {row.support_error_se:.3f}), relative MSE {mse}",
            err=True,
            fg=color,
        )


ConfigOption = typer.Option(None, "--config", exists=True, readable=True, help="YAML experiment config")
SeedOption = typer.Option(None, "--seed", help="Override seeds.master")
TrialsOption = typer.Option(None, "--trials", help="Override trials per SNR")
SnrOption = typer.Option(None, "--snr-db", help="Override snr_db with a comma list, e.g. 0,10,20")
WorkersOption = typer.Option(1, "--workers", min=1, help="Worker processes for trials")
CONFIG_HINT = "Hint: Check the key names and values in the config file."


@app.command()
def run(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    trials: Optional[int] = TrialsOption,
    snr_db: Optional[str] = SnrOption,
    workers: int = WorkersOption,
):
    """Run the configured experiment and print the per-(k, SNR) summary as JSON."""
    try:
        cfg = _load(config, seed, trials, snr_db)
        result = run_sweep(cfg, workers=workers)
        levels = ",".join(str(k) for k in cfg.sparsity_levels)
        typer.secho(
            f"Ran {len(result.records)} trials at {len(cfg.snr_db)} SNR points (n={cfg.params.n}, k={levels}).",
            err=True,
        )
        _report(result.summary)
        typer.echo(json.dumps([row.to_dict() for row in result.summary], indent=2))
    except ConfigError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        typer.secho(CONFIG_HINT, err=True, fg=typer.colors.YELLOW)
        raise typer.Exit(1)
    except ValueError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)
    except OSError as e:
        typer.secho(f"I/O Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)


@app.command()
def sweep(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = typer.Option(None, "--out", help="Per-trial CSV destination (defaults to config 'out')"),
    seed: Optional[int] = SeedOption,
    trials: Optional[int] = TrialsOption,
    snr_db: Optional[str] = SnrOption,
    workers: int = WorkersOption,
    timing: bool = typer.Option(True, "--timing/--no-timing", help="Record decode wall-clock per trial"),
):
    """Run every trial at every SNR and sparsity level and write per-trial and summary CSVs."""
    try:
        cfg = _load(config, seed, trials, snr_db)
        destination = out or cfg.out
        result = run_sweep(cfg, workers=workers, timing=timing)
        write_records_csv(result.records, destination)
        write_summary_csv(result.summary, summary_path(destination))
        _report(result.summary)
        typer.echo(f"Wrote {len(result.records)} trial records -> {destination}")
        typer.echo(f"Wrote summary -> {summary_path(destination)}")
    except ConfigError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        typer.secho(CONFIG_HINT, err=True, fg=typer.colors.YELLOW)
        raise typer.Exit(1)
    except ValueError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)
    except OSError as e:
        typer.secho(f"I/O Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)


@app.command("analyze-graph")
def analyze_graph_command(
    k: int = typer.Option(100, "--k", min=1, help="Number of signal nodes"),
    b: Optional[int] = typer.Option(None, "--b", min=1, help="Number of bins (default 3k)"),
    d: int = typer.Option(3, "--d", min=1, help="Bins per signal"),
    seeds: int = typer.Option(1000, "--seeds", min=1, help="Number of graph seeds"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV destination (stdout if omitted)"),
):
    """Census of tree / unicyclic / complex components of the support graph."""
    bins = b if b is not None else 3 * k
    try:
        rows = analyze_graph(k, bins, d, seeds)
        clean = sum(1 for row in rows if row[7] == "0")
        typer.secho(f"{clean}/{len(rows)} graphs contain only tree or unicyclic components.", err=True)
        if out:
            write_graph_csv(rows, out)
            typer.echo(f"Wrote {len(rows)} census rows -> {out}")
        else:
            typer.echo(csv_text(GRAPH_HEADER, rows), nl=False)
    except ValueError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)
    except OSError as e:
        typer.secho(f"I/O Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)


@app.command("analyze-errors")
def analyze_errors_command(
    config: Optional[Path] = ConfigOption,
    out: Optional[Path] = typer.Option(None, "--out", help="CSV destination (stdout if omitted)"),
    seed: Optional[int] = SeedOption,
    trials: Optional[int] = TrialsOption,
    snr_db: Optional[str] = SnrOption,
):
    """Compare message-passing error estimates with the decoder's actual errors."""
    try:
        cfg = _load(config, seed, trials, snr_db)
        rows, excluded = analyze_errors(cfg)
        typer.secho(
            f"Analysed {cfg.trials - excluded} trials; excluded {excluded} with misclassified bins.",
            err=True,
            fg=typer.colors.GREEN if not excluded else typer.colors.YELLOW,
        )
        if out:
            write_error_csv(rows, out)
            typer.echo(f"Wrote {len(rows)} node rows -> {out}")
        else:
            typer.echo(csv_text(ERROR_HEADER, rows), nl=False)
    except ConfigError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        typer.secho(CONFIG_HINT, err=True, fg=typer.colors.YELLOW)
        raise typer.Exit(1)
    except ValueError as e:
        typer.secho(f"Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)
    except OSError as e:
        typer.secho(f"I/O Error: {e}", err=True, fg=typer.colors.RED)
        raise typer.Exit(1)


if __name__ == "__main__":
    app()
