import math

import pytest

from uavisac.config import (ConfigError, MULTI_OBJECT, ObjectSpec, SimConfig, format_objects,
                            load_config, parse_config)


def test_empty_file_gives_table_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(path)
    assert cfg == SimConfig()
    assert (cfg.N_t, cfg.N_r, cfg.f_c, cfg.kappa, cfg.iota, cfg.G_m) == (30, 30, 30e9, 80e6, 1e-5, 10)
    assert cfg.epsilon == 120 + 120j
    assert cfg.dT == 0.01
    assert math.isclose(cfg.evolution_std[0], math.radians(0.02))
    assert math.isclose(cfg.spacing, cfg.wavelength / 2)


def test_override_only_touches_named_key():
    cfg = parse_config("N_t = 16\n")
    assert cfg.N_t == 16
    assert cfg.replace(N_t=30) == SimConfig()


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\n  h = 90   # metres\nobjects = 45:30:-5\n")
    assert cfg.h == 90
    assert cfg.objects == (ObjectSpec(45, 30, -5),)


def test_negative_dt_rejected_with_line():
    with pytest.raises(ConfigError, match=r"cfg:2: dT must be positive"):
        parse_config("N_t = 16\ndT = -1\n", "cfg")


@pytest.mark.parametrize("text, message", [
    ("bogus = 1", "unknown key 'bogus'"),
    ("N_t 16", "expected 'key = value'"),
    ("N_t = sixteen", "cannot parse 'N_t'"),
    ("h = 1\nh = 2", "duplicate key 'h'"),
    ("objects = 200:1", "object angle"),
    ("truth_model = fuzzy", "truth_model"),
])
def test_parse_errors_are_line_precise(text, message):
    with pytest.raises(ConfigError, match=message) as info:
        parse_config(text, "f.cfg")
    assert str(info.value).startswith("f.cfg")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_config(tmp_path / "nope.cfg")


def test_objects_round_trip():
    assert parse_config(f"objects = {format_objects(MULTI_OBJECT)}").objects == MULTI_OBJECT


def test_complex_value():
    assert parse_config("epsilon = 100 + 50j").epsilon == 100 + 50j


def test_seed_range():
    SimConfig(seed=2**64 - 1)
    with pytest.raises(ConfigError):
        SimConfig(seed=2**64)
