#!/usr/bin/env python3
"""Benchmark script for measuring measurement and decode time as n grows."""

import time

from gldpc_cs import api
from gldpc_cs.config import build_config
from gldpc_cs.harness import build_level_codec, derive_trial_seed, sample_signal, trial_params


def benchmark_dimension(exponent, k=100, trials=10, snr_db=30.0):
    """Average measure and recover wall-clock at n = 2^exponent."""
    cfg = build_config(
        {"n": 2**exponent, "k": k, "trials": trials, "snr_db": [snr_db], "alphabet.mode": "discrete"}
    )
    codec = build_level_codec(cfg)
    measure_times = []
    decode_times = []
    tests = []
    failures = 0
    for trial in range(trials):
        seed = derive_trial_seed(cfg.master_seed, k, 0, trial)
        scheme = api.build_scheme(trial_params(cfg, snr_db, seed), codec)
        signal = sample_signal(cfg, seed)

        start = time.perf_counter()
        meas = api.measure_signal(signal, scheme)
        measure_times.append(time.perf_counter() - start)

        start = time.perf_counter()
        result = api.recover(meas, scheme)
        decode_times.append(time.perf_counter() - start)

        tests.append(result.singleton_tests)
        failures += result.recovered_support() != signal.support()

    return {
        "n": cfg.params.n,
        "c": cfg.params.c,
        "avg_measure_sec": sum(measure_times) / trials,
        "avg_decode_sec": sum(decode_times) / trials,
        "max_singleton_tests": max(tests),
        "test_budget": cfg.params.b + k * cfg.params.d,
        "support_failures": failures,
    }


def main():
    """Run benchmarks over n in {2^20, 2^26, 2^33} and report results."""
    print("=" * 80)
    print("gldpc-cs Benchmark (k = 100, b = 300, SNR 30 dB)")
    print("=" * 80)
    print()

    results = [benchmark_dimension(exponent) for exponent in (20, 26, 33)]
    for result in results:
        print(f"n = {result['n']:>14} | c = {result['c']:>4} | "
              f"measure {result['avg_measure_sec']*1000:>8.2f} ms | "
              f"decode {result['avg_decode_sec']*1000:>8.2f} ms | "
              f"tests {result['max_singleton_tests']:>4} <= {result['test_budget']} | "
              f"failures {result['support_failures']}")

    decode = [r["avg_decode_sec"] for r in results]
    print()
    print(f"Decode time spread across n: {max(decode) / min(decode):.2f}x")
    print("=" * 80)

if __name__ == "__main__":
    main()
