import pytest

from corecdyn.config import KEYS, PRESETS, load_config, parse_config, preset_path
from corecdyn.errors import ConfigError
from corecdyn.geometry import ConvexCore
from corecdyn.thickness import Harmonic

BASIC = """
# comment line
core.kind = ellipse
core.a = 2
core.b = 1   # inline comment
thickness.d0 = 0.3
thickness.harmonics = 0.1:2, 0.05:3:0.5
"""


def test_parse_basic():
    cfg = parse_config(BASIC)
    assert cfg.core() == ConvexCore.ellipse(2.0, 1.0)
    assert cfg.thickness().terms == (Harmonic(0.1, 2, 0.0), Harmonic(0.05, 3, 0.5))
    assert cfg["seed"] == 42
    assert cfg.variant == "exact"
    assert cfg.scan_m() == 2


def test_defaults_cover_every_key():
    cfg = parse_config("thickness.d0 = 1")
    assert set(cfg.values) == set(KEYS)
    assert cfg.thickness().is_constant
    assert cfg.scan_m() == 1


@pytest.mark.parametrize("text", [
    "thickness.d0 = 1\nbogus.key = 3",
    "thickness.d0 = 1\nthickness.d0 = 2",
    "thickness.d0 = abc",
    "thickness.d0 = -1",
    "thickness.d0 = nan",
    "thickness.d0 = 1\nthickness.harmonics = 0.1",
    "thickness.d0 = 1\nmap.variant = second-order",
    "thickness.d0 = 1\ncore.kind = square",
    "thickness.d0 = 1\nscan.d0_min = 2\nscan.d0_max = 1",
    "thickness.d0 = 1\nflow.scales = 1, -0.5",
    "no delimiter here",
])
def test_rejects_bad_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_required_key():
    cfg = parse_config("core.kind = ellipse\ncore.a = 2")
    with pytest.raises(ConfigError, match="core.b"):
        cfg.core()
    with pytest.raises(ConfigError, match="thickness.d0"):
        cfg.thickness()


def test_overrides_are_validated():
    cfg = parse_config("thickness.d0 = 1")
    assert cfg.with_overrides(**{"map.variant": "first-order"}).variant == "first-order"
    with pytest.raises(ConfigError):
        cfg.with_overrides(**{"map.variant": "nope"})
    with pytest.raises(ConfigError):
        cfg.with_overrides(**{"not.a.key": 1})


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name, tmp_path):
    cfg = load_config(name)
    cfg.shape()
    copy = tmp_path / name
    copy.write_text(preset_path(name).read_text())
    assert load_config(str(copy)).values == cfg.values
    assert load_config(name[:-4]).values == cfg.values


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/thing.cfg")
