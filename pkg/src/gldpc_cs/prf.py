"""Keyed counter-mode generators.

Every random object of the scheme (bin hashing, Rademacher blocks, noise,
code construction) is a function of a seed, a domain tag and a counter such
as a signal index or a bin number. Nothing is stored per index, so the
hashing matrix and the columns of an n = 10^10 scheme can be queried on
demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class KeyedStream:
    seed: int
    domain: str
    key: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        tag = int.from_bytes(self.domain.encode("utf-8")[:8].ljust(8, b"\0"), "little")
        state = np.random.SeedSequence([int(self.seed) & _MASK64, tag]).generate_state(1, np.uint64)
        object.__setattr__(self, "key", int(state[0]))

    def generator(self, counter: int) -> np.random.Generator:
        """Philox generator keyed by (stream key, counter)."""
        return np.random.Generator(np.random.Philox(key=(self.key << 64) | (int(counter) & _MASK64)))


__all__ = ["KeyedStream"]
