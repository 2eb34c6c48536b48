"""Tests for experiment configuration loading."""

from pathlib import Path

import pytest

from gldpc_cs.config import ConfigError, build_config, flatten, load_config
from gldpc_cs.scheme import CodeKind, DiscreteAlphabet


def test_defaults_follow_simulation_study():
    """n = 10^10, k = 100, b = 3k, c0 = 2 log n, c1 = log n, c2 = 2 log n, 200 trials, 0..30 dB."""
    cfg = load_config(None)
    p = cfg.params
    assert (p.n, p.k, p.b, p.d) == (10**10, 100, 300, 3)
    assert (p.c0, p.c1, p.c2) == (68, 34, 68)
    assert p.tau == 0.5
    assert p.code_kind is CodeKind.LDPC
    assert not p.is_discrete
    assert cfg.snr_db == (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    assert cfg.trials == 200
    assert (cfg.amplitude.lo, cfg.amplitude.hi) == (1.0, 10.0)
    assert cfg.master_seed == 0
    assert cfg.out == Path("results.csv")


def test_nested_and_dotted_keys_are_equivalent(tmp_path):
    """Nested mappings flatten to dotted keys."""
    nested = tmp_path / "nested.yaml"
    nested.write_text("n: 4096\nk: 8\ncode:\n  kind: repetition\nseeds:\n  master: 3\n", encoding="utf-8")
    dotted = tmp_path / "dotted.yaml"
    dotted.write_text("n: 4096\nk: 8\ncode.kind: repetition\nseeds.master: 3\n", encoding="utf-8")
    assert load_config(nested) == load_config(dotted)
    assert load_config(nested).params.code_kind is CodeKind.REPETITION


def test_flatten():
    """flatten joins nested keys with dots."""
    assert flatten({"a": 1, "b": {"c": 2, "d": {"e": 3}}}) == {"a": 1, "b.c": 2, "b.d.e": 3}


def test_discrete_alphabet_defaults():
    """Discrete mode defaults to +/-1..+/-10 with min_amplitude 1."""
    cfg = build_config({"alphabet.mode": "discrete", "n": 1024, "k": 4})
    assert isinstance(cfg.params.alphabet, DiscreteAlphabet)
    assert sorted(cfg.params.alphabet.values) == sorted(float(s * v) for v in range(1, 11) for s in (-1, 1))
    assert cfg.params.min_amplitude == 1.0


def test_discrete_alphabet_values_from_list_and_string():
    """Alphabet values may be a YAML list or a comma string."""
    a = build_config({"alphabet.mode": "discrete", "alphabet.values": [2, -3], "n": 1024, "k": 4})
    b = build_config({"alphabet.mode": "discrete", "alphabet.values": "2, -3", "n": 1024, "k": 4})
    assert a.params.alphabet == b.params.alphabet == DiscreteAlphabet((2.0, -3.0))
    assert a.params.min_amplitude == 2.0


def test_overrides_replace_file_values(tmp_path):
    """Non-None overrides win; None overrides are ignored."""
    path = tmp_path / "cfg.yaml"
    path.write_text("n: 4096\nk: 8\ntrials: 5\nsnr_db: [10, 20]\n", encoding="utf-8")
    cfg = load_config(path, {"trials": 2, "snr_db": "0,30", "seeds.master": None})
    assert cfg.trials == 2
    assert cfg.snr_db == (0.0, 30.0)
    assert cfg.master_seed == 0


def test_sparsity_sets_bins():
    """b defaults to 3k and may be set explicitly."""
    assert build_config({"n": 4096, "k": 8}).params.b == 24
    assert build_config({"n": 4096, "k": 8, "b": 40}).params.b == 40


def test_code_rate_sets_code_length():
    """c0 = ceil(nbits / rate)."""
    assert build_config({"n": 4096, "k": 8, "code.rate": 0.25}).params.c0 == 48
    with pytest.raises(ConfigError):
        build_config({"n": 4096, "k": 8, "code.rate": 1.5})


@pytest.mark.parametrize(
    "values, message",
    [
        ({"bogus": 1}, "Unknown config key"),
        ({"trials": 0}, "trials"),
        ({"snr_db": []}, "snr_db"),
        ({"k": 2.5}, "k must be an integer"),
        ({"tau": "high"}, "tau must be a number"),
        ({"alphabet.mode": "gaussian"}, "alphabet.mode"),
        ({"alphabet.values": [1, 2]}, "only valid"),
        ({"alphabet.mode": "discrete", "alphabet.values": [1, 0]}, "zero"),
        ({"code.kind": "turbo"}, "code.kind"),
        ({"amplitude.lo": 5, "amplitude.hi": 2}, "amplitude"),
        ({"amplitude.lo": 0.5, "min_amplitude": 1}, "min_amplitude"),
        ({"n": 64, "k": 100}, "k <= n"),
        ({"k": [10, 20, 10]}, "twice"),
        ({"k": []}, "at least one"),
        ({"seeds.master": -1}, "seeds.master"),
        ({"alphabet.mode": "discrete", "alphabet.values": [1, -2], "min_amplitude": 1.5}, "smallest alphabet magnitude"),
    ],
)
def test_invalid_configs(values, message):
    """Every malformed value is a ConfigError naming the problem."""
    with pytest.raises(ConfigError, match=message):
        build_config(values)


def test_non_mapping_document(tmp_path):
    """A YAML list is not a config."""
    path = tmp_path / "cfg.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_unparseable_yaml(tmp_path):
    """Malformed YAML is reported as a ConfigError."""
    path = tmp_path / "cfg.yaml"
    path.write_text("n: [1, 2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="Cannot parse"):
        load_config(path)


def test_empty_file_uses_defaults(tmp_path):
    """An empty document is the default config."""
    path = tmp_path / "cfg.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(path) == load_config(None)


def test_missing_file_raises_os_error(tmp_path):
    """A missing path surfaces as OSError."""
    with pytest.raises(OSError):
        load_config(tmp_path / "missing.yaml")


def test_sparsity_levels_from_list():
    """k may list several levels; each gets 3k bins and shares the code length."""
    cfg = build_config({"n": 4096, "k": [8, 16, 4]})
    assert cfg.sparsity_levels == (8, 16, 4)
    assert [level.b for level in cfg.levels] == [24, 48, 12]
    assert {level.c0 for level in cfg.levels} == {24}
    assert cfg.params == cfg.levels[0]
    assert build_config({"n": 4096, "k": "8, 16"}).sparsity_levels == (8, 16)


def test_explicit_b_applies_to_every_level():
    cfg = build_config({"n": 4096, "k": [8, 16], "b": 60})
    assert [level.b for level in cfg.levels] == [60, 60]


def test_single_level_config_has_one_level():
    cfg = build_config({"n": 4096, "k": 8})
    assert cfg.sparsity_levels == (8,)
    assert cfg.at_level(8) == cfg


def test_at_level_restricts_the_experiment():
    """at_level keeps every other setting and drops the other levels."""
    cfg = build_config({"n": 4096, "k": [8, 16], "trials": 3, "seeds.master": 5})
    level = cfg.at_level(16)
    assert level.params.k == 16
    assert level.sparsity_levels == (16,)
    assert (level.trials, level.master_seed, level.snr_db) == (3, 5, cfg.snr_db)
    with pytest.raises(ConfigError, match="not one of the configured levels"):
        cfg.at_level(32)


def test_discrete_min_amplitude_at_smallest_magnitude_is_accepted():
    cfg = build_config(
        {"alphabet.mode": "discrete", "alphabet.values": [2, -3], "min_amplitude": 2, "n": 1024, "k": 4}
    )
    assert cfg.params.min_amplitude == 2.0
