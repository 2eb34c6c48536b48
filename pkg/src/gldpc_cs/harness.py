"""Monte-Carlo experiments: support-recovery error rate and relative MSE versus SNR."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .api import Scheme, build_scheme, measure_signal, recover
from .columns import bin_noise
from .config import ExperimentConfig
from .decoder import DecodeResult
from .errorprop import ComplexComponentError, build_error_graph, classification_ok, propagate, variance_bound
from .graph import BinHasher, ComponentKind, build_support_graph, component_census
from .prf import KeyedStream
from .scheme import ArbitraryAlphabet, SchemeParams, SparseSignal, snr_to_sigma2
from .subcode import IndexCodec, make_codec

logger = logging.getLogger(__name__)

RESULT_HEADER = (
    "trial",
    "snr_db",
    "n",
    "k",
    "support_ok",
    "relative_mse",
    "iterations",
    "singleton_tests",
    "decode_seconds",
)
SUMMARY_HEADER = (
    "k",
    "snr_db",
    "trials",
    "support_error_rate",
    "support_error_se",
    "mean_relative_mse",
    "mse_trials",
)
GRAPH_HEADER = (
    "seed",
    "k",
    "b",
    "d",
    "n_components",
    "n_tree",
    "n_unicyclic",
    "n_complex",
    "largest_signals",
)
ERROR_HEADER = ("trial", "node", "iteration", "e_i", "p_i_mp", "p_i_actual", "var_bound")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    snr_db: float
    n: int
    k: int
    support_ok: bool
    relative_mse: Optional[float]
    iterations: int
    singleton_tests: int
    decode_seconds: float

    def to_row(self) -> List[str]:
        return [
            str(self.trial),
            _fmt(self.snr_db),
            str(self.n),
            str(self.k),
            "true" if self.support_ok else "false",
            "" if self.relative_mse is None else _fmt(self.relative_mse),
            str(self.iterations),
            str(self.singleton_tests),
            _fmt(self.decode_seconds),
        ]


@dataclass(frozen=True)
class SummaryRow:
    k: int
    snr_db: float
    trials: int
    support_error_rate: float
    support_error_se: float
    mean_relative_mse: Optional[float]
    mse_trials: int

    def to_row(self) -> List[str]:
        return [
            str(self.k),
            _fmt(self.snr_db),
            str(self.trials),
            _fmt(self.support_error_rate),
            _fmt(self.support_error_se),
            "" if self.mean_relative_mse is None else _fmt(self.mean_relative_mse),
            str(self.mse_trials),
        ]

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in SUMMARY_HEADER}


@dataclass
class SweepResult:
    records: List[TrialRecord]
    summary: List[SummaryRow]


def _fmt(value: float) -> str:
    return repr(float(value))


def derive_seed(*words: int | str) -> int:
    """64-bit seed hashed from integers and tags."""
    entropy = [w if isinstance(w, int) else int.from_bytes(w.encode("utf-8"), "little") for w in words]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def derive_trial_seed(master: int, level: int, snr_index: int, trial: int) -> int:
    return derive_seed(master, level, snr_index, trial)


def level_code_seed(config: ExperimentConfig) -> int:
    """The index code is fixed per (master seed, sparsity level)."""
    return derive_seed(config.master_seed, config.params.k, "code")


def build_level_codec(config: ExperimentConfig) -> IndexCodec:
    params = config.params
    return make_codec(
        params.code_kind, params.n, params.c0, seed=level_code_seed(config), max_iters=params.code_max_iters
    )


def draw_amplitudes(config: ExperimentConfig, rng: np.random.Generator, size: int) -> np.ndarray:
    params = config.params
    if params.is_discrete:
        return rng.choice(np.asarray(params.alphabet.values), size=size)
    magnitudes = rng.uniform(config.amplitude.lo, config.amplitude.hi, size=size)
    return magnitudes * rng.choice(np.array([-1.0, 1.0]), size=size)


def level_amplitudes(config: ExperimentConfig, k: Optional[int] = None) -> np.ndarray:
    """Nonzero entries drawn once per (master seed, sparsity level) and reused for every trial and SNR."""
    k = config.params.k if k is None else k
    rng = KeyedStream(config.master_seed, "amplitude").generator(k)
    return draw_amplitudes(config, rng, k)


def _distinct_indices(n: int, k: int, rng: np.random.Generator) -> List[int]:
    chosen: List[int] = []
    seen = set()
    while len(chosen) < k:
        for index in rng.integers(0, n, size=k - len(chosen)).tolist():
            if index not in seen:
                seen.add(index)
                chosen.append(index)
    return chosen


def sample_signal(config: ExperimentConfig, trial_seed: int, k: Optional[int] = None) -> SparseSignal:
    """k distinct uniform indices carrying the level's fixed amplitudes."""
    n = config.params.n
    k = config.params.k if k is None else k
    if k == 0:
        return SparseSignal(n=n)
    support = _distinct_indices(n, k, KeyedStream(trial_seed, "support").generator(0))
    return SparseSignal(n=n, entries=dict(zip(support, level_amplitudes(config, k).tolist())))


def trial_params(config: ExperimentConfig, snr_db: float, trial_seed: int) -> SchemeParams:
    return replace(
        config.params,
        sigma2=snr_to_sigma2(snr_db),
        graph_seed=derive_seed(trial_seed, "graph"),
        column_seed=derive_seed(trial_seed, "column"),
        noise_seed=derive_seed(trial_seed, "noise"),
        code_seed=level_code_seed(config),
    )


def relative_mse(x: SparseSignal, x_hat: SparseSignal) -> float:
    """||x - x_hat||^2 / ||x||^2 over the support of x."""
    error = sum((value - x_hat.entries.get(i, 0.0)) ** 2 for i, value in x.entries.items())
    return error / x.squared_norm()


def run_trial(
    config: ExperimentConfig,
    snr_db: float,
    trial_seed: int,
    *,
    trial: int = 0,
    codec: Optional[IndexCodec] = None,
    timing: bool = True,
) -> TrialRecord:
    """Sample, measure, peel and score one instance."""
    scheme = build_scheme(trial_params(config, snr_db, trial_seed), codec or build_level_codec(config))
    signal = sample_signal(config, trial_seed)
    measurements = measure_signal(signal, scheme)

    start = time.perf_counter()
    result = recover(measurements, scheme)
    elapsed = time.perf_counter() - start if timing else 0.0

    support_ok = result.recovered_support() == signal.support()
    return TrialRecord(
        trial=trial,
        snr_db=float(snr_db),
        n=config.params.n,
        k=config.params.k,
        support_ok=support_ok,
        relative_mse=relative_mse(signal, result.x_hat) if support_ok else None,
        iterations=result.iterations,
        singleton_tests=result.singleton_tests,
        decode_seconds=elapsed,
    )


def _run_task(
    task: Tuple[ExperimentConfig, int, int, float, int, IndexCodec, bool],
) -> Tuple[Tuple[int, int, int], TrialRecord]:
    config, level_index, snr_index, snr_db, trial, codec, timing = task
    seed = derive_trial_seed(config.master_seed, config.params.k, snr_index, trial)
    record = run_trial(config, snr_db, seed, trial=trial, codec=codec, timing=timing)
    return (level_index, snr_index, trial), record


def summarize(records: Sequence[TrialRecord]) -> List[SummaryRow]:
    """Per (k, SNR) support error rate (with binomial standard error) and conditional mean relative MSE."""
    rows: List[SummaryRow] = []
    for k, snr in dict.fromkeys((r.k, r.snr_db) for r in records):
        group = [r for r in records if r.k == k and r.snr_db == snr]
        failures = sum(1 for r in group if not r.support_ok)
        rate = failures / len(group)
        mses = [r.relative_mse for r in group if r.relative_mse is not None]
        rows.append(
            SummaryRow(
                k=k,
                snr_db=snr,
                trials=len(group),
                support_error_rate=rate,
                support_error_se=math.sqrt(rate * (1 - rate) / len(group)),
                mean_relative_mse=float(np.mean(mses)) if mses else None,
                mse_trials=len(mses),
            )
        )
    return rows


def sweep(config: ExperimentConfig, *, workers: int = 1, timing: bool = True) -> SweepResult:
    """All trials at every SNR for every sparsity level.

    Each level keeps one code and one set of amplitudes across its SNR grid.
    """
    tasks = []
    for level_index, k in enumerate(config.sparsity_levels):
        level = config.at_level(k)
        codec = build_level_codec(level)
        tasks.extend(
            (level, level_index, snr_index, snr_db, trial, codec, timing)
            for snr_index, snr_db in enumerate(config.snr_db)
            for trial in range(config.trials)
        )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = [_run_task(task) for task in tasks]

    outcomes.sort(key=lambda item: item[0])
    records = [record for _, record in outcomes]
    summary = summarize(records)
    for row in summary:
        logger.info(
            "k=%d, SNR %.1f dB: support error rate %.4f (+/- %.4f), mean relative MSE %s over %d trials",
            row.k, row.snr_db, row.support_error_rate, row.support_error_se, row.mean_relative_mse, row.mse_trials,
        )
    return SweepResult(records=records, summary=summary)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_records_csv(records: Iterable[TrialRecord], path: Path) -> None:
    _write_csv(path, RESULT_HEADER, (r.to_row() for r in records))


def write_summary_csv(summary: Iterable[SummaryRow], path: Path) -> None:
    _write_csv(path, SUMMARY_HEADER, (row.to_row() for row in summary))


def summary_path(out: Path) -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}.summary.csv")


def analyze_graph(k: int, b: int, d: int, seeds: int, *, first_seed: int = 0) -> List[List[str]]:
    """Component census of the support graph of k signals for each graph seed."""
    rows: List[List[str]] = []
    for seed in range(first_seed, first_seed + seeds):
        report = component_census(build_support_graph(range(k), BinHasher(b=b, d=d, seed=seed)))
        rows.append(
            [
                str(seed),
                str(k),
                str(b),
                str(d),
                str(len(report.components)),
                str(report.count(ComponentKind.TREE)),
                str(report.count(ComponentKind.UNICYCLIC)),
                str(report.count(ComponentKind.COMPLEX)),
                str(report.largest_signals),
            ]
        )
    return rows


def write_graph_csv(rows: Iterable[Sequence[str]], path: Path) -> None:
    _write_csv(path, GRAPH_HEADER, rows)


def _error_rows(trial: int, scheme: Scheme, signal: SparseSignal, result: DecodeResult) -> List[List[str]]:
    params = scheme.params
    noise = KeyedStream(params.noise_seed, "noise")
    graph = build_error_graph(
        result, scheme.hasher, scheme.gen, lambda j: bin_noise(noise, j, scheme.gen.c, params.sigma2)
    )
    p, _ = propagate(graph, scheme.gen)
    rows: List[List[str]] = []
    for node in graph.ordered():
        actual = signal.entries[node.index] - result.x_hat.entries.get(node.index, 0.0)
        try:
            bound = _fmt(variance_bound(graph, node.index, params.sigma2, params.c))
        except ComplexComponentError:
            bound = ""
        rows.append(
            [
                str(trial),
                str(node.index),
                str(node.iteration),
                _fmt(node.point_error),
                _fmt(p[node.index]),
                _fmt(actual),
                bound,
            ]
        )
    return rows


def analyze_errors(config: ExperimentConfig) -> Tuple[List[List[str]], int]:
    """Message-passing errors against the decoder's actual errors at the first configured SNR and sparsity level.

    Values are estimated by correlation (arbitrary alphabet) so residual errors exist.
    Trials with any misclassified bin are skipped and counted.
    """
    config = replace(config, params=replace(config.params, alphabet=ArbitraryAlphabet()), levels=())
    codec = build_level_codec(config)
    snr_db = config.snr_db[0]
    rows: List[List[str]] = []
    excluded = 0
    for trial in range(config.trials):
        seed = derive_trial_seed(config.master_seed, config.params.k, 0, trial)
        scheme = build_scheme(trial_params(config, snr_db, seed), codec)
        signal = sample_signal(config, seed)
        result = recover(measure_signal(signal, scheme), scheme)
        if not classification_ok(result, signal, scheme.hasher):
            excluded += 1
            continue
        rows.extend(_error_rows(trial, scheme, signal, result))
    logger.info("Error analysis: %d trials analysed, %d excluded", config.trials - excluded, excluded)
    return rows, excluded


def write_error_csv(rows: Iterable[Sequence[str]], path: Path) -> None:
    _write_csv(path, ERROR_HEADER, rows)


__all__ = [
    "ERROR_HEADER",
    "GRAPH_HEADER",
    "RESULT_HEADER",
    "SUMMARY_HEADER",
    "SummaryRow",
    "SweepResult",
    "TrialRecord",
    "analyze_errors",
    "analyze_graph",
    "build_level_codec",
    "csv_text",
    "derive_seed",
    "derive_trial_seed",
    "draw_amplitudes",
    "level_amplitudes",
    "relative_mse",
    "run_trial",
    "sample_signal",
    "summarize",
    "summary_path",
    "sweep",
    "trial_params",
    "write_error_csv",
    "write_graph_csv",
    "write_records_csv",
    "write_summary_csv",
]
