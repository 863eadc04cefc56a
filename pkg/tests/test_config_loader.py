# tests/test_config_loader.py
from __future__ import annotations

from pathlib import Path

import pytest

from app.core.config_loader import (
    build_run_config,
    dump_config,
    load_run_config,
    parse_layers,
    read_config_file,
    read_seeds_file,
    write_resolved_config,
    write_seeds_file,
)
from app.core.errors import ConfigError
from app.models import RunConfig, WindKind

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _ini(tmp_path, text: str) -> Path:
    path = tmp_path / "experiment.ini"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_round_trip(tmp_path):
    text = dump_config(RunConfig())
    assert text.startswith("# hab-coverage experiment configuration")
    for section in ("[env]", "[wind]", "[train]", "[baseline]", "[run]"):
        assert section in text
    assert load_run_config(_ini(tmp_path, text)) == RunConfig()


def test_no_file_gives_defaults():
    assert load_run_config() == RunConfig()


def test_values_are_read_and_typed(tmp_path):
    cfg = load_run_config(
        _ini(
            tmp_path,
            "[env]\nn_agents = 6\nr_coverage = 120.5\n\n"
            "[wind]\nkind = uniform\nbearing_deg = 90  # due east\n\n"
            "[run]\nseeds = 3, 4 5\nheatmaps = true\n",
        )
    )
    assert cfg.env.n_agents == 6
    assert cfg.env.r_coverage == 120.5
    assert cfg.env.wind.kind == WindKind.UNIFORM
    assert cfg.env.wind.bearing_deg == 90.0
    assert cfg.run.seeds == [3, 4, 5]
    assert cfg.run.heatmaps is True


def test_empty_value_means_default(tmp_path):
    cfg = load_run_config(_ini(tmp_path, "[env]\nn_agents =\n[run]\ncheckpoint =\n"))
    assert cfg.env.n_agents == 3
    assert cfg.run.checkpoint is None


@pytest.mark.parametrize(
    "text, key",
    [
        ("[env]\nfoo = 1\n", "env.foo"),
        ("[physics]\ng = 9.81\n", "physics"),
        ("[env]\nwind = favorable\n", "env.wind"),
    ],
)
def test_unknown_keys_are_named(tmp_path, text, key):
    with pytest.raises(ConfigError) as exc:
        read_config_file(_ini(tmp_path, text))
    assert exc.value.key == key


@pytest.mark.parametrize(
    "text, key",
    [
        ("[env]\nn_agents = 0\n", "env.n_agents"),
        ("[env]\nn_agents = three\n", "env.n_agents"),
        ("[wind]\nspeed_mps = -1\n", "wind.speed_mps"),
        ("[train]\ngamma = 1.5\n", "train.gamma"),
        ("[run]\npolicy = greedy\n", "run.policy"),
    ],
)
def test_invalid_values_are_named(tmp_path, text, key):
    with pytest.raises(ConfigError) as exc:
        load_run_config(_ini(tmp_path, text))
    assert exc.value.key == key
    assert exc.value.detail["error_code"] == "CONFIG"


def test_key_outside_section(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(_ini(tmp_path, "[DEFAULT]\nn_agents = 3\n"))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(tmp_path / "absent.ini")


def test_layers():
    layers = parse_layers("15000:30:6:3000, 21000:260:7:3000:0.01:0.5,")
    assert len(layers) == 2
    assert layers[0] == {"center_altitude_m": 15000.0, "bearing_deg": 30.0, "speed_mps": 6.0, "vertical_extent_m": 3000.0}
    assert layers[1]["bearing_rate_deg_per_min"] == 0.01
    assert layers[1]["speed_rate_mps_per_min"] == 0.5


@pytest.mark.parametrize("raw", ["15000:30:6", "15000:30:6:3000:1", "15000:north:6:3000"])
def test_bad_layers(raw):
    with pytest.raises(ConfigError) as exc:
        parse_layers(raw)
    assert exc.value.key == "wind.layers"


def test_layered_kind_needs_layers(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(_ini(tmp_path, "[wind]\nkind = layered\n"))


def test_overrides_win_over_the_file(tmp_path):
    path = _ini(tmp_path, "[env]\nn_agents = 6\nepisode_steps = 100\n")
    cfg = load_run_config(path, {("env", "n_agents"): 4, ("env", "episode_steps"): None})
    assert cfg.env.n_agents == 4
    assert cfg.env.episode_steps == 100
    with pytest.raises(ConfigError) as exc:
        build_run_config({}, {("env", "speed"): 1})
    assert exc.value.key == "env.speed"


def test_config_from_the_environment(tmp_path, monkeypatch):
    from app.settings import get_settings

    path = _ini(tmp_path, "[env]\nn_levels = 9\n")
    monkeypatch.setenv("HABCOV_CONFIG", str(path))
    get_settings.cache_clear()
    assert load_run_config().env.n_levels == 9
    # an explicit path still wins
    other = tmp_path / "other.ini"
    other.write_text("[env]\nn_levels = 4\n", encoding="utf-8")
    assert load_run_config(other).env.n_levels == 4


def test_resolved_config_reloads(tmp_path):
    cfg = load_run_config(CONFIGS / "layered_example.ini", {("run", "seeds"): [7, 8]})
    path = write_resolved_config(cfg, tmp_path / "out")
    assert path.name == "resolved_config.ini"
    assert load_run_config(path) == cfg


@pytest.mark.parametrize("name", ["desk_scale.ini", "full_scale.ini", "uniform_wind.ini", "layered_example.ini"])
def test_shipped_configs_load(name):
    cfg = load_run_config(CONFIGS / name)
    assert isinstance(cfg, RunConfig)


def test_shipped_layered_example():
    wind = load_run_config(CONFIGS / "layered_example.ini").env.wind
    assert wind.kind == WindKind.LAYERED
    assert [l.center_altitude_m for l in wind.layers] == [15000.0, 18000.0, 21000.0, 24000.0]


def test_seed_files(tmp_path):
    path = tmp_path / "seeds.txt"
    path.write_text("# held out\n1000 1001, 1002\n\n1003  # last\n", encoding="utf-8")
    assert read_seeds_file(path) == [1000, 1001, 1002, 1003]
    assert read_seeds_file(CONFIGS / "heldout_seeds.txt") == list(range(1000, 1020))

    written = write_seeds_file([5, 6], tmp_path / "run")
    assert read_seeds_file(written) == [5, 6]


@pytest.mark.parametrize("text", ["# nothing here\n", "12 abc\n"])
def test_bad_seed_files(tmp_path, text):
    path = tmp_path / "seeds.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        read_seeds_file(path)
