"""Measurement columns g_i = [g~_i; g-_i; g._i] and the bin-wise operator y = (H . G) x + z."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List

import numpy as np

from .graph import DENSE_GUARD, BinHasher, h_matrix
from .prf import KeyedStream
from .scheme import SparseSignal
from .subcode import IndexCodec


class DenseMatrixTooLarge(ValueError):
    """The dense oracle would exceed its size guard."""


@dataclass(frozen=True)
class ColumnGenerator:
    codec: IndexCodec
    c1: int
    c2: int
    column_seed: int
    stream: KeyedStream = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "stream", KeyedStream(self.column_seed, "rademacher"))

    @property
    def c0(self) -> int:
        return self.codec.c0

    @property
    def c(self) -> int:
        return self.codec.c0 + self.c1 + self.c2

    def rademacher(self, i: int) -> np.ndarray:
        """The verification block g._i."""
        flips = self.stream.generator(i).integers(0, 2, size=self.c2, dtype=np.int8)
        return (1 - 2 * flips).astype(np.int8)

    def column(self, i: int) -> np.ndarray:
        return np.concatenate(
            [
                self.codec.encode(i).astype(float),
                np.ones(self.c1),
                self.rademacher(i).astype(float),
            ]
        )


@dataclass
class BinMeasurement:
    y: np.ndarray
    c0: int
    c1: int

    @property
    def tilde(self) -> np.ndarray:
        return self.y[: self.c0]

    @property
    def bar(self) -> np.ndarray:
        return self.y[self.c0 : self.c0 + self.c1]

    @property
    def dot(self) -> np.ndarray:
        return self.y[self.c0 + self.c1 :]


@dataclass
class MeasurementSet:
    values: np.ndarray
    c0: int
    c1: int

    @property
    def b(self) -> int:
        return self.values.shape[0]

    @property
    def c(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.b

    def __getitem__(self, j: int) -> BinMeasurement:
        return BinMeasurement(self.values[j], self.c0, self.c1)

    def __iter__(self) -> Iterator[BinMeasurement]:
        return (self[j] for j in range(self.b))

    @property
    def bins(self) -> List[BinMeasurement]:
        return list(self)

    def flat(self) -> np.ndarray:
        """The stacked m-dimensional measurement vector."""
        return self.values.reshape(-1)


def bin_noise(stream: KeyedStream, j: int, c: int, sigma2: float) -> np.ndarray:
    """Noise realization z_j of bin j."""
    if sigma2 == 0:
        return np.zeros(c)
    return stream.generator(j).standard_normal(c) * math.sqrt(sigma2)


def noise_matrix(noise_seed: int, b: int, c: int, sigma2: float) -> np.ndarray:
    stream = KeyedStream(noise_seed, "noise")
    return np.stack([bin_noise(stream, j, c, sigma2) for j in range(b)]) if b else np.zeros((0, c))


def measure(
    x: SparseSignal,
    hasher: BinHasher,
    gen: ColumnGenerator,
    noise_seed: int,
    sigma2: float,
) -> MeasurementSet:
    """Bin-wise y_j = sum_i H_ij x_i g_i + z_j, touching only the support."""
    values = np.zeros((hasher.b, gen.c))
    for i in x.support():
        contribution = x.entries[i] * gen.column(i)
        for j in hasher.bins_of(i):
            values[j] += contribution
    values += noise_matrix(noise_seed, hasher.b, gen.c, sigma2)
    return MeasurementSet(values=values, c0=gen.c0, c1=gen.c1)


def block_product(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    """H (b x n) . G (c x n): block row j holds H_ji g_i in column i."""
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    if h.shape[1] != g.shape[1]:
        raise ValueError(f"H has {h.shape[1]} columns but G has {g.shape[1]}")
    b, n = h.shape
    c = g.shape[0]
    return (h[:, None, :] * g[None, :, :]).reshape(b * c, n)


def dense_matrix(hasher: BinHasher, gen: ColumnGenerator, n: int) -> np.ndarray:
    """Materialized measurement matrix A = H . G. Testing oracle for small n."""
    if hasher.b * gen.c * n > DENSE_GUARD:
        raise DenseMatrixTooLarge(f"A would have {hasher.b * gen.c} x {n} entries (limit {DENSE_GUARD})")
    g = np.stack([gen.column(i) for i in range(n)], axis=1)
    return block_product(h_matrix(hasher, n), g)


def subtract_contribution(bin: BinMeasurement, value: float, i: int, gen: ColumnGenerator) -> BinMeasurement:
    """y_j <- y_j - value * g_i."""
    return BinMeasurement(bin.y - value * gen.column(i), bin.c0, bin.c1)


__all__ = [
    "BinMeasurement",
    "ColumnGenerator",
    "DenseMatrixTooLarge",
    "MeasurementSet",
    "bin_noise",
    "block_product",
    "dense_matrix",
    "measure",
    "noise_matrix",
    "subtract_contribution",
]
