"""Scheme parameters, the sparse-signal type and shared scalar utilities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import erfc

DEFAULT_TAU = 0.5
DEFAULT_DEGREE = 3
DEFAULT_CODE_RATE = 0.5
DEFAULT_MAX_ITERS = 50


class SchemeError(ValueError):
    """Raised when scheme parameters or signals violate their invariants."""


class CodeKind(str, Enum):
    REPETITION = "repetition"
    LDPC = "ldpc"


@dataclass(frozen=True)
class DiscreteAlphabet:
    """Known finite set of nonzero amplitudes."""

    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not values:
            raise SchemeError("Discrete alphabet must not be empty")
        if any(v == 0.0 for v in values):
            raise SchemeError("Discrete alphabet must not contain zero")
        if len(set(values)) != len(values):
            raise SchemeError("Discrete alphabet values must be distinct")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class ArbitraryAlphabet:
    """Amplitudes are unknown reals; values are estimated by correlation."""


Alphabet = Union[DiscreteAlphabet, ArbitraryAlphabet]


def nbits_for(n: int) -> int:
    """Information bits needed to index {0..n-1}: ceil(log2 n), at least one."""
    return max(1, (int(n) - 1).bit_length())


@dataclass(frozen=True)
class SchemeParams:
    n: int
    k: int
    b: int
    d: int
    c0: int
    c1: int
    c2: int
    sigma2: float = 0.0
    tau: float = DEFAULT_TAU
    alphabet: Alphabet = field(default_factory=ArbitraryAlphabet)
    min_amplitude: float = 1.0
    code_kind: CodeKind = CodeKind.LDPC
    code_max_iters: int = DEFAULT_MAX_ITERS
    graph_seed: int = 0
    column_seed: int = 1
    code_seed: int = 2
    noise_seed: int = 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "code_kind", CodeKind(self.code_kind))
        if not 1 <= self.k <= self.n:
            raise SchemeError(f"Need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not 1 <= self.d <= self.b:
            raise SchemeError(f"Need 1 <= d <= b, got d={self.d}, b={self.b}")
        if self.c0 < self.nbits:
            raise SchemeError(f"c0={self.c0} is shorter than the {self.nbits} index bits of n={self.n}")
        if self.c1 < 1 or self.c2 < 1:
            raise SchemeError(f"Need c1 >= 1 and c2 >= 1, got c1={self.c1}, c2={self.c2}")
        if self.sigma2 < 0 or not math.isfinite(self.sigma2):
            raise SchemeError(f"Noise variance must be finite and >= 0, got {self.sigma2}")
        if self.tau <= 0:
            raise SchemeError(f"Threshold slack tau must be > 0, got {self.tau}")
        if self.min_amplitude <= 0:
            raise SchemeError(f"min_amplitude must be > 0, got {self.min_amplitude}")
        if self.code_max_iters < 1:
            raise SchemeError("code_max_iters must be >= 1")

    @classmethod
    def for_simulation(
        cls,
        n: int,
        k: int,
        *,
        code_rate: float = DEFAULT_CODE_RATE,
        d: int = DEFAULT_DEGREE,
        **overrides,
    ) -> "SchemeParams":
        """Parameter set of the simulation study: b = 3k, c0 = nbits/R, c1 = nbits, c2 = 2 nbits."""
        if not 0 < code_rate <= 1:
            raise SchemeError(f"Code rate must lie in (0, 1], got {code_rate}")
        nbits = nbits_for(n)
        values = dict(
            n=n,
            k=k,
            b=3 * k,
            d=d,
            c0=math.ceil(nbits / code_rate),
            c1=nbits,
            c2=2 * nbits,
        )
        values.update(overrides)
        return cls(**values)

    @property
    def nbits(self) -> int:
        return nbits_for(self.n)

    @property
    def c(self) -> int:
        return self.c0 + self.c1 + self.c2

    @property
    def m(self) -> int:
        return self.b * self.c

    @property
    def code_rate(self) -> float:
        return self.nbits / self.c0

    @property
    def is_discrete(self) -> bool:
        return isinstance(self.alphabet, DiscreteAlphabet)


@dataclass(frozen=True)
class SparseSignal:
    """The unknown x: a sparse map index -> nonzero value in dimension n."""

    n: int
    entries: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        entries: Dict[int, float] = {}
        for index, value in self.entries.items():
            index = int(index)
            value = float(value)
            if not 0 <= index < self.n:
                raise SchemeError(f"Signal index {index} outside [0, {self.n})")
            if value == 0.0:
                raise SchemeError(f"Signal entry {index} is zero; store only nonzero values")
            entries[index] = value
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_dense(cls, x: Sequence[float]) -> "SparseSignal":
        x = np.asarray(x, dtype=float)
        return cls(n=len(x), entries={int(i): float(x[i]) for i in np.flatnonzero(x)})

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.entries))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.n)
        for index, value in self.entries.items():
            dense[index] = value
        return dense

    def squared_norm(self) -> float:
        return float(sum(v * v for v in self.entries.values()))

    def __len__(self) -> int:
        return len(self.entries)


def sgn(x: float) -> int:
    return 1 if x >= 0 else -1


def index_bits(i: int, nbits: int) -> np.ndarray:
    """MSB-first binary representation of i with 0 -> +1 and 1 -> -1."""
    if nbits < 1 or not 0 <= i < (1 << nbits):
        raise SchemeError(f"Index {i} does not fit in {nbits} bits")
    shifts = np.arange(nbits - 1, -1, -1, dtype=np.int64)
    bits = (np.int64(i) >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


def bits_index(v: Sequence[int]) -> int:
    """Inverse of index_bits."""
    index = 0
    for symbol in np.asarray(v).tolist():
        index = (index << 1) | (1 if symbol < 0 else 0)
    return index


def q_function(x: float) -> float:
    """Upper-tail probability of the standard normal distribution."""
    return float(0.5 * erfc(x / math.sqrt(2.0)))


def snr_to_sigma2(snr_db: float) -> float:
    """SNR = 1 / sigma^2, given in dB."""
    return float(10.0 ** (-float(snr_db) / 10.0))


__all__ = [
    "Alphabet",
    "ArbitraryAlphabet",
    "CodeKind",
    "DiscreteAlphabet",
    "SchemeError",
    "SchemeParams",
    "SparseSignal",
    "bits_index",
    "index_bits",
    "nbits_for",
    "q_function",
    "sgn",
    "snr_to_sigma2",
]
