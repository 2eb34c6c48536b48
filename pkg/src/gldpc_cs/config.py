"""Experiment configuration: YAML documents with dotted or nested keys."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from .scheme import (
    ArbitraryAlphabet,
    CodeKind,
    DEFAULT_CODE_RATE,
    DEFAULT_DEGREE,
    DEFAULT_MAX_ITERS,
    DEFAULT_TAU,
    DiscreteAlphabet,
    SchemeError,
    SchemeParams,
    nbits_for,
)

KNOWN_KEYS = (
    "n",
    "k",
    "b",
    "d",
    "c0",
    "c1",
    "c2",
    "tau",
    "snr_db",
    "trials",
    "alphabet.mode",
    "alphabet.values",
    "amplitude.lo",
    "amplitude.hi",
    "min_amplitude",
    "code.kind",
    "code.rate",
    "code.max_iters",
    "seeds.master",
    "out",
)

DEFAULT_N = 10**10
DEFAULT_K = 100
DEFAULT_SNR_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
DEFAULT_TRIALS = 200
DEFAULT_DISCRETE_VALUES = tuple(float(s * v) for v in range(1, 11) for s in (-1, 1))


class ConfigError(ValueError):
    """The experiment configuration is malformed."""


@dataclass(frozen=True)
class AmplitudeRange:
    lo: float
    hi: float


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment over one or more sparsity levels.

    `params` is the first level; `levels` holds the parameters of every level
    in configured order. sigma2 and the graph/column/noise seeds of each level
    are replaced per trial.
    """

    params: SchemeParams
    snr_db: Tuple[float, ...]
    trials: int
    amplitude: AmplitudeRange
    master_seed: int
    out: Path
    levels: Tuple[SchemeParams, ...] = ()

    def __post_init__(self) -> None:
        if not self.levels:
            object.__setattr__(self, "levels", (self.params,))
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_db:
            raise ConfigError("snr_db must list at least one SNR")
        if self.master_seed < 0:
            raise ConfigError(f"seeds.master must be >= 0, got {self.master_seed}")
        if self.params.is_discrete:
            smallest = min(abs(v) for v in self.params.alphabet.values)
            if self.params.min_amplitude > smallest:
                raise ConfigError(
                    f"min_amplitude={self.params.min_amplitude} exceeds the smallest alphabet magnitude {smallest}"
                )
        else:
            if not 0 < self.amplitude.lo <= self.amplitude.hi:
                raise ConfigError(f"Need 0 < amplitude.lo <= amplitude.hi, got {self.amplitude}")
            if self.amplitude.lo < self.params.min_amplitude:
                raise ConfigError(
                    f"amplitude.lo={self.amplitude.lo} is below min_amplitude={self.params.min_amplitude}"
                )

    @property
    def sparsity_levels(self) -> Tuple[int, ...]:
        return tuple(level.k for level in self.levels)

    def at_level(self, k: int) -> "ExperimentConfig":
        """The same experiment restricted to sparsity level k."""
        for level in self.levels:
            if level.k == k:
                return replace(self, params=level, levels=(level,))
        raise ConfigError(f"k={k} is not one of the configured levels {self.sparsity_levels}")


def flatten(doc: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, prefix=f"{name}."))
        else:
            flat[name] = value
    return flat


def _as_int(key: str, value: Any) -> int:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    if not math.isfinite(number) or number != int(number):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value) if isinstance(value, int) else int(number)


def _as_float(key: str, value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _as_floats(key: str, value: Any) -> Tuple[float, ...]:
    if isinstance(value, str):
        items = [part.strip() for part in value.split(",") if part.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [value]
    return tuple(_as_float(key, item) for item in items)


def _as_levels(value: Any) -> Tuple[int, ...]:
    """k as one sparsity level or a list of them."""
    if isinstance(value, str):
        items = [part.strip() for part in value.split(",") if part.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [value]
    levels = tuple(_as_int("k", item) for item in items)
    if not levels:
        raise ConfigError("k must list at least one sparsity level")
    if len(set(levels)) != len(levels):
        raise ConfigError(f"k lists a sparsity level twice: {list(levels)}")
    return levels


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a flat key/value mapping and fill in the simulation defaults."""
    unknown = sorted(set(values) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"Unknown config key(s): {', '.join(unknown)}")
    get = values.get

    n = _as_int("n", get("n", DEFAULT_N))
    ks = _as_levels(get("k", DEFAULT_K))
    nbits = nbits_for(n)
    rate = _as_float("code.rate", get("code.rate", DEFAULT_CODE_RATE))
    if not 0 < rate <= 1:
        raise ConfigError(f"code.rate must lie in (0, 1], got {rate}")

    mode = str(get("alphabet.mode", "arbitrary")).lower()
    if mode == "discrete":
        raw_values = get("alphabet.values")
        alphabet_values = _as_floats("alphabet.values", raw_values) if raw_values is not None else DEFAULT_DISCRETE_VALUES
        try:
            alphabet = DiscreteAlphabet(alphabet_values)
        except SchemeError as exc:
            raise ConfigError(str(exc)) from exc
        default_delta = min(abs(v) for v in alphabet.values)
    elif mode == "arbitrary":
        if get("alphabet.values") is not None:
            raise ConfigError("alphabet.values is only valid with alphabet.mode: discrete")
        alphabet = ArbitraryAlphabet()
        default_delta = None
    else:
        raise ConfigError(f"alphabet.mode must be 'discrete' or 'arbitrary', got {mode!r}")

    amplitude = AmplitudeRange(
        lo=_as_float("amplitude.lo", get("amplitude.lo", 1.0)),
        hi=_as_float("amplitude.hi", get("amplitude.hi", 10.0)),
    )
    min_amplitude = _as_float(
        "min_amplitude", get("min_amplitude", default_delta if default_delta is not None else amplitude.lo)
    )

    try:
        code_kind = CodeKind(str(get("code.kind", CodeKind.LDPC.value)).lower())
    except ValueError:
        raise ConfigError(f"code.kind must be 'ldpc' or 'repetition', got {get('code.kind')!r}") from None

    shared = dict(
        n=n,
        d=_as_int("d", get("d", DEFAULT_DEGREE)),
        c0=_as_int("c0", get("c0", math.ceil(nbits / rate))),
        c1=_as_int("c1", get("c1", nbits)),
        c2=_as_int("c2", get("c2", 2 * nbits)),
        tau=_as_float("tau", get("tau", DEFAULT_TAU)),
        alphabet=alphabet,
        min_amplitude=min_amplitude,
        code_kind=code_kind,
        code_max_iters=_as_int("code.max_iters", get("code.max_iters", DEFAULT_MAX_ITERS)),
    )
    try:
        # an explicit b applies to every level, otherwise each level gets 3k bins
        levels = tuple(SchemeParams(k=k, b=_as_int("b", get("b", 3 * k)), **shared) for k in ks)
    except SchemeError as exc:
        raise ConfigError(str(exc)) from exc

    return ExperimentConfig(
        params=levels[0],
        snr_db=_as_floats("snr_db", get("snr_db", DEFAULT_SNR_DB)),
        trials=_as_int("trials", get("trials", DEFAULT_TRIALS)),
        amplitude=amplitude,
        master_seed=_as_int("seeds.master", get("seeds.master", 0)),
        out=Path(str(get("out", "results.csv"))),
        levels=levels,
    )


def load_config(path: Optional[Path], overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Read a YAML config (or defaults when path is None) and apply non-None overrides."""
    doc: Any = {}
    if path is not None:
        try:
            doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Cannot parse {path}: {exc}") from exc
    if not isinstance(doc, Mapping):
        raise ConfigError(f"Config {path} must be a key/value document")
    values = flatten(doc)
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return build_config(values)


__all__ = [
    "AmplitudeRange",
    "ConfigError",
    "ExperimentConfig",
    "KNOWN_KEYS",
    "build_config",
    "flatten",
    "load_config",
]
