"""Per-bin index codes.

A singleton bin reveals sgn(s * y~), a noisy copy of the coded index bits.
After sign compensation that copy has passed through a binary symmetric
channel, so any hard-decision BSC decoder can recover the index.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import List, Tuple

import numpy as np

from .prf import KeyedStream
from .scheme import CodeKind, DEFAULT_MAX_ITERS, bits_index, index_bits, nbits_for, q_function

logger = logging.getLogger(__name__)

DEFAULT_COLUMN_WEIGHT = 3
MAX_CONSTRUCTION_ATTEMPTS = 100


class DecodeFailure(Exception):
    """The observation does not decode to a valid signal index."""


class IndexCodec(ABC):
    kind: CodeKind

    def __init__(self, n: int, c0: int):
        self.n = int(n)
        self.nbits = nbits_for(n)
        if c0 < self.nbits:
            raise ValueError(f"Codeword length {c0} cannot carry {self.nbits} index bits")
        self.c0 = int(c0)

    @property
    def rate(self) -> float:
        return self.nbits / self.c0

    def encode(self, i: int) -> np.ndarray:
        """Codeword of index i as a +/-1 vector of length c0."""
        if not 0 <= i < self.n:
            raise ValueError(f"Index {i} outside [0, {self.n})")
        return self._encode(int(i))

    def decode(self, obs: np.ndarray) -> int:
        """Index carried by the hard observation, or DecodeFailure."""
        obs = np.asarray(obs)
        if obs.shape != (self.c0,):
            raise ValueError(f"Expected an observation of length {self.c0}, got shape {obs.shape}")
        index = self._decode(obs)
        if index >= self.n:
            raise DecodeFailure(f"Decoded index {index} is outside [0, {self.n})")
        return index

    @abstractmethod
    def _encode(self, i: int) -> np.ndarray: ...

    @abstractmethod
    def _decode(self, obs: np.ndarray) -> int: ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, nbits={self.nbits}, c0={self.c0})"


class RepetitionCodec(IndexCodec):
    """Each index bit repeated c0 // nbits times; leftover positions carry +1."""

    kind = CodeKind.REPETITION

    def __init__(self, n: int, c0: int):
        super().__init__(n, c0)
        self.reps = self.c0 // self.nbits

    def _encode(self, i: int) -> np.ndarray:
        word = np.ones(self.c0, dtype=np.int8)
        word[: self.reps * self.nbits] = np.repeat(index_bits(i, self.nbits), self.reps)
        return word

    def _decode(self, obs: np.ndarray) -> int:
        groups = obs[: self.reps * self.nbits].reshape(self.nbits, self.reps).sum(axis=1)
        # majority vote, ties resolve to +1 (bit 0)
        return bits_index(np.where(groups >= 0, 1, -1))


def _draw_regular(rows: int, length: int, column_weight: int, rng: np.random.Generator) -> np.ndarray:
    h = np.zeros((rows, length), dtype=np.uint8)
    load = np.zeros(rows, dtype=np.int64)
    for col in range(length):
        # least-loaded rows first, random among equals; row weights stay within one of each other
        picked = np.lexsort((rng.random(rows), load))[:column_weight]
        h[picked, col] = 1
        load[picked] += 1
    return h


def _regular_parity_check(
    rows: int,
    length: int,
    column_weight: int,
    rng: np.random.Generator,
    attempts: int = MAX_CONSTRUCTION_ATTEMPTS,
) -> np.ndarray:
    """Random parity-check matrix: every column has exactly `column_weight` ones, row weights balanced.

    Redraws until the columns are pairwise distinct. Distinct weight-3 columns
    share at most two checks, so greedy flipping corrects any single error.
    When that many distinct columns cannot exist, or no draw finds them, the
    draw with the fewest repeated columns is kept.
    """
    if rows == 0:
        return np.zeros((0, length), dtype=np.uint8)
    column_weight = min(column_weight, rows)
    best, best_repeats = None, length
    for _ in range(attempts):
        h = _draw_regular(rows, length, column_weight, rng)
        repeats = length - np.unique(h, axis=1).shape[1]
        if repeats == 0:
            return h
        if repeats < best_repeats:
            best, best_repeats = h, repeats
        if length > math.comb(rows, column_weight):
            break
    logger.debug("Parity check keeps %d repeated columns (rows=%d length=%d)", best_repeats, rows, length)
    return best


def _gf2_rref(h: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    a = h.copy() % 2
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        mask = a[:, c].astype(bool)
        mask[r] = False
        a[mask] ^= a[r]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _systematic_generator(h: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Generator with k information positions, plus the column order that moves them to the front."""
    length = h.shape[1]
    reduced, pivots = _gf2_rref(h)
    free = [c for c in range(length) if c not in set(pivots)]
    info = free[:k]
    generator = np.zeros((k, length), dtype=np.uint8)
    generator[np.arange(k), info] = 1
    if pivots:
        generator[:, pivots] = reduced[:, info].T
    rest = [c for c in range(length) if c not in set(info)]
    order = np.array(info + rest, dtype=np.int64)
    return generator[:, order], order


class RegularLdpcCode:
    """Random regular LDPC code with a systematic generator and a bit-flipping decoder."""

    def __init__(
        self,
        k: int,
        length: int,
        seed: int,
        *,
        column_weight: int = DEFAULT_COLUMN_WEIGHT,
        max_iters: int = DEFAULT_MAX_ITERS,
    ):
        if not 1 <= k <= length:
            raise ValueError(f"Need 1 <= k <= length, got k={k}, length={length}")
        self.k = k
        self.length = length
        self.max_iters = max_iters
        rng = KeyedStream(seed, "ldpc").generator((length << 32) | k)
        parity = _regular_parity_check(length - k, length, column_weight, rng)
        self.generator, order = _systematic_generator(parity, k)
        self.parity_check = parity[:, order]
        self._check = self.parity_check.astype(np.int64)
        self._degrees = self._check.sum(axis=0)
        logger.debug("Built LDPC code k=%d length=%d checks=%d", k, length, parity.shape[0])

    def encode_bits(self, bits: np.ndarray) -> np.ndarray:
        return (np.asarray(bits, dtype=np.int64) @ self.generator % 2).astype(np.uint8)

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        return (self._check @ np.asarray(bits, dtype=np.int64) % 2).astype(np.uint8)

    def bit_flip(self, hard: np.ndarray) -> np.ndarray:
        """Greedy bit flipping: each round flips the bits with the most unsatisfied checks.

        Only bits where more than half of the checks fail are candidates.
        """
        hard = np.asarray(hard, dtype=np.int64).copy()
        for _ in range(self.max_iters):
            syndrome = self._check @ hard % 2
            if not syndrome.any():
                break
            unsatisfied = syndrome @ self._check
            candidates = 2 * unsatisfied > self._degrees
            if not candidates.any():
                break
            hard[candidates & (unsatisfied == unsatisfied[candidates].max())] ^= 1
        if (self._check @ hard % 2).any():
            raise DecodeFailure("Parity checks still violated after bit flipping")
        return hard.astype(np.uint8)


class LdpcCodec(IndexCodec):
    kind = CodeKind.LDPC

    def __init__(self, n: int, c0: int, *, seed: int, max_iters: int = DEFAULT_MAX_ITERS):
        super().__init__(n, c0)
        self.code = RegularLdpcCode(self.nbits, self.c0, seed, max_iters=max_iters)

    def _encode(self, i: int) -> np.ndarray:
        bits = (1 - index_bits(i, self.nbits)) // 2
        return (1 - 2 * self.code.encode_bits(bits).astype(np.int8)).astype(np.int8)

    def _decode(self, obs: np.ndarray) -> int:
        decoded = self.code.bit_flip((obs < 0).astype(np.int64))
        index = 0
        for bit in decoded[: self.nbits].tolist():
            index = (index << 1) | bit
        return index


def make_codec(
    kind: CodeKind | str,
    n: int,
    c0: int,
    *,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> IndexCodec:
    kind = CodeKind(kind)
    if kind is CodeKind.REPETITION:
        return RepetitionCodec(n, c0)
    return LdpcCodec(n, c0, seed=seed, max_iters=max_iters)


def bsc_crossover(amplitude: float, noise_std: float) -> float:
    """Flip probability of sgn(|a| + w), w ~ N(0, noise_std^2)."""
    if noise_std <= 0:
        raise ValueError(f"noise_std must be > 0, got {noise_std}")
    return q_function(abs(amplitude) / noise_std)


def empirical_flip_rate(amplitude: float, noise_std: float, symbols: int, rng: np.random.Generator) -> float:
    """Fraction of symbols whose sign flips when a * 1 + w is hard-decided."""
    reference = 1 if amplitude >= 0 else -1
    received = np.where(amplitude + rng.normal(0.0, noise_std, size=symbols) >= 0, 1, -1)
    return float(np.mean(received != reference))


__all__ = [
    "DecodeFailure",
    "IndexCodec",
    "LdpcCodec",
    "RegularLdpcCode",
    "RepetitionCodec",
    "bsc_crossover",
    "empirical_flip_rate",
    "make_codec",
]
