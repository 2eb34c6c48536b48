"""Singleton test and the iterative peeling recovery."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Sequence, Union

import numpy as np

from .columns import BinMeasurement, ColumnGenerator, MeasurementSet, subtract_contribution
from .graph import BinHasher
from .scheme import SchemeParams, SparseSignal, sgn
from .subcode import DecodeFailure, IndexCodec

logger = logging.getLogger(__name__)

# Per-entry slack on energy thresholds so a noiseless bin (threshold 0, energy 0) still passes.
NUMERIC_SLACK = 1e-9


@dataclass(frozen=True)
class Zeroton:
    pass


@dataclass(frozen=True)
class Singleton:
    index: int
    value: float
    sign: int
    estimate: float


@dataclass(frozen=True)
class Multiton:
    reason: str = ""


SingletonTestResult = Union[Zeroton, Singleton, Multiton]


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    index: int
    bin: int
    value: float


@dataclass(frozen=True)
class Subtraction:
    index: int
    bin: int


@dataclass
class DecodeResult:
    x_hat: SparseSignal
    iterations: int
    trace: List[TraceEntry]
    unresolved_bins: int
    singleton_tests: int
    subtractions: List[Subtraction] = field(default_factory=list)

    def recovered_support(self) -> tuple:
        return tuple(sorted(entry.index for entry in self.trace))

    def entry_for(self, index: int) -> Optional[TraceEntry]:
        for entry in self.trace:
            if entry.index == index:
                return entry
        return None


def zeroton_test(bin: BinMeasurement, params: SchemeParams) -> bool:
    energy = float(bin.dot @ bin.dot)
    return energy <= params.c2 * (1 + params.tau) * params.sigma2 + NUMERIC_SLACK * params.c2


def estimate_value_discrete(ydot: np.ndarray, gdot: np.ndarray, alphabet: Sequence[float]) -> float:
    """Alphabet element closest to the verification block; ties go to the smaller value."""
    best_value = None
    best_energy = np.inf
    for value in sorted(alphabet):
        residual = ydot - value * gdot
        energy = float(residual @ residual)
        if energy < best_energy:
            best_value, best_energy = value, energy
    return float(best_value)


def singleton_test(
    bin: BinMeasurement,
    params: SchemeParams,
    codec: IndexCodec,
    gen: ColumnGenerator,
    hasher: BinHasher,
    bin_index: int,
) -> SingletonTestResult:
    if zeroton_test(bin, params):
        return Zeroton()

    sign = sgn(float(bin.bar.sum()))
    try:
        index = codec.decode(np.where(sign * bin.tilde >= 0, 1, -1))
    except DecodeFailure:
        return Multiton("decode")

    gdot = gen.rademacher(index).astype(float)
    ydot = bin.dot
    estimate = float(gdot @ ydot) / params.c2
    residual = ydot - estimate * gdot
    threshold = (params.c2 - 1) * (1 + params.tau) * params.sigma2 + NUMERIC_SLACK * params.c2
    if float(residual @ residual) > threshold:
        return Multiton("verification")
    if not hasher.contains(index, bin_index):
        return Multiton("membership")

    if params.is_discrete:
        value = estimate_value_discrete(ydot, gdot, params.alphabet.values)
    else:
        value = float(gen.column(index) @ bin.y) / params.c
    return Singleton(index=index, value=value, sign=sign, estimate=estimate)


def peel_decode(
    meas: MeasurementSet,
    params: SchemeParams,
    codec: IndexCodec,
    gen: ColumnGenerator,
    hasher: BinHasher,
) -> DecodeResult:
    """Seed with a singleton test on every bin, then peel recovered signals off their other bins."""
    work = meas.values.copy()
    removed = np.zeros(meas.b, dtype=bool)
    last: List[Optional[SingletonTestResult]] = [None] * meas.b
    recovered: Dict[int, float] = {}
    level: Dict[int, int] = {}
    trace: List[TraceEntry] = []
    subtractions: List[Subtraction] = []
    queue: Deque[int] = deque()
    tests = 0

    def run_test(j: int, iteration: int) -> None:
        nonlocal tests
        tests += 1
        result = singleton_test(BinMeasurement(work[j], meas.c0, meas.c1), params, codec, gen, hasher, j)
        last[j] = result
        if not isinstance(result, Singleton):
            return
        removed[j] = True
        if result.index in recovered:
            return
        recovered[result.index] = result.value
        level[result.index] = iteration
        trace.append(TraceEntry(iteration, result.index, j, result.value))
        queue.append(result.index)

    for j in range(meas.b):
        run_test(j, 1)

    while queue:
        i = queue.popleft()
        for j in hasher.bins_of(i):
            if removed[j]:
                continue
            peeled = subtract_contribution(BinMeasurement(work[j], meas.c0, meas.c1), recovered[i], i, gen)
            work[j] = peeled.y
            subtractions.append(Subtraction(i, j))
            run_test(j, level[i] + 1)

    unresolved = sum(1 for j in range(meas.b) if not removed[j] and isinstance(last[j], Multiton))
    iterations = max(level.values(), default=0)
    logger.debug(
        "Peeling recovered %d signals over %d levels with %d singleton tests, %d bins unresolved",
        len(trace), iterations, tests, unresolved,
    )
    return DecodeResult(
        x_hat=SparseSignal(n=params.n, entries={i: v for i, v in recovered.items() if v != 0.0}),
        iterations=iterations,
        trace=trace,
        unresolved_bins=unresolved,
        singleton_tests=tests,
        subtractions=subtractions,
    )


__all__ = [
    "DecodeResult",
    "Multiton",
    "NUMERIC_SLACK",
    "Singleton",
    "SingletonTestResult",
    "Subtraction",
    "TraceEntry",
    "Zeroton",
    "estimate_value_discrete",
    "peel_decode",
    "singleton_test",
    "zeroton_test",
]
