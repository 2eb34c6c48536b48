"""High-level API for programmatic use."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .columns import ColumnGenerator, MeasurementSet, measure
from .decoder import DecodeResult, peel_decode
from .graph import BinHasher
from .scheme import SchemeParams, SparseSignal
from .subcode import IndexCodec, make_codec


@dataclass(frozen=True)
class Scheme:
    """Everything the measurement and recovery sides share."""

    params: SchemeParams
    hasher: BinHasher
    codec: IndexCodec
    gen: ColumnGenerator


def build_scheme(params: SchemeParams, codec: Optional[IndexCodec] = None) -> Scheme:
    """
    Instantiate the hashing graph, index code and column generator for a parameter set.

    Args:
        params: Scheme parameters (dimensions, thresholds, seeds)
        codec: Optional prebuilt index code; reused across trials when only the graph,
            column and noise seeds change

    Returns:
        Scheme bundle
    """
    if codec is None:
        codec = make_codec(
            params.code_kind,
            params.n,
            params.c0,
            seed=params.code_seed,
            max_iters=params.code_max_iters,
        )
    return Scheme(
        params=params,
        hasher=BinHasher(b=params.b, d=params.d, seed=params.graph_seed),
        codec=codec,
        gen=ColumnGenerator(codec=codec, c1=params.c1, c2=params.c2, column_seed=params.column_seed),
    )


def measure_signal(signal: SparseSignal, scheme: Scheme) -> MeasurementSet:
    params = scheme.params
    return measure(signal, scheme.hasher, scheme.gen, params.noise_seed, params.sigma2)


def recover(measurements: MeasurementSet, scheme: Scheme) -> DecodeResult:
    return peel_decode(measurements, scheme.params, scheme.codec, scheme.gen, scheme.hasher)


__all__ = ["Scheme", "build_scheme", "measure_signal", "recover"]
