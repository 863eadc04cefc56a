# tests/test_windfield.py
from __future__ import annotations

import math

import numpy as np
import pytest

from app.core.errors import WindDomainError, WindParseError
from app.models import WindKind, WindSpec
from app.sim.windfield import (
    ForecastModel,
    LayeredWindModel,
    WindLayer,
    build_wind_model,
    clamp_speed,
    favorable_layers,
    level_altitudes,
    load_gridded_wind,
    sample_column,
    sample_wind,
    save_gridded_wind,
)


@pytest.fixture
def favorable() -> LayeredWindModel:
    return LayeredWindModel(favorable_layers(8.0))


def test_level_altitudes_span_the_band():
    alts = level_altitudes(37)
    assert alts.shape == (37,)
    assert alts[0] == 15000.0
    assert alts[-1] == 25000.0
    assert np.allclose(np.diff(alts), 10000.0 / 36)


def test_level_altitudes_needs_two_levels():
    with pytest.raises(WindDomainError):
        level_altitudes(1)


def test_column_shape_and_ranges(favorable):
    column = sample_column(favorable, 10.0, -20.0, 30.0, 11)
    assert len(column) == 11
    assert column.altitudes[0] == 15000.0 and column.altitudes[-1] == 25000.0
    assert np.all((column.bearings >= 0.0) & (column.bearings < 2 * math.pi))
    assert np.all((column.speeds >= 0.0) & (column.speeds <= favorable.v_max))
    assert len(column.levels) == 11


@pytest.mark.parametrize(
    "altitude, bearing",
    [(16000.0, 0.0), (18500.0, 0.5 * math.pi), (21000.0, math.pi), (23500.0, 1.5 * math.pi)],
)
def test_favorable_layer_centers(favorable, altitude, bearing):
    w = sample_wind(favorable, 0.0, 0.0, altitude, 0.0)
    assert w.bearing == pytest.approx(bearing, abs=1e-12)
    assert w.speed == pytest.approx(8.0, abs=1e-12)


def test_blend_between_layers_is_weight_normalized(favorable):
    # halfway between the north and east layers
    w = favorable.sample_wind(0.0, 0.0, 17250.0, 0.0)
    assert w.bearing == pytest.approx(0.25 * math.pi, abs=1e-12)
    assert w.speed == pytest.approx(math.sqrt(32.0), abs=1e-12)


def test_band_edges_take_the_nearest_layer(favorable):
    bottom = favorable.sample_wind(0.0, 0.0, 15000.0, 0.0)
    top = favorable.sample_wind(0.0, 0.0, 25000.0, 0.0)
    assert bottom.bearing == pytest.approx(0.0, abs=1e-12)
    assert top.bearing == pytest.approx(1.5 * math.pi, abs=1e-12)
    assert bottom.speed == pytest.approx(8.0) and top.speed == pytest.approx(8.0)


def test_speed_is_clamped_to_v_max():
    model = LayeredWindModel([WindLayer(20000.0, 1.0, 80.0, math.inf)], v_max=50.0)
    w = model.sample_wind(0.0, 0.0, 20000.0, 0.0)
    assert w.speed == pytest.approx(50.0)
    assert w.bearing == pytest.approx(1.0)


@pytest.mark.parametrize("altitude", [14999.0, 25000.5, float("nan")])
def test_query_outside_band_is_rejected(favorable, altitude):
    with pytest.raises(WindDomainError):
        favorable.sample_wind(0.0, 0.0, altitude, 0.0)


def test_non_finite_position_is_rejected(favorable):
    with pytest.raises(WindDomainError):
        favorable.sample_wind(float("inf"), 0.0, 20000.0, 0.0)


def test_layers_must_cover_the_band():
    with pytest.raises(WindDomainError):
        LayeredWindModel([WindLayer(16000.0, 0.0, 5.0, 500.0)])
    with pytest.raises(WindDomainError):
        LayeredWindModel([])


def test_layered_model_is_deterministic_per_seed():
    layers = favorable_layers(8.0)
    kwargs = dict(bearing_modulation_rad=0.3, speed_modulation_mps=2.0)
    a = LayeredWindModel(layers, seed=5, **kwargs)
    b = LayeredWindModel(layers, seed=5, **kwargs)
    c = LayeredWindModel(layers, seed=6, **kwargs)
    alts = level_altitudes(9)
    ua, va = a.sample_uv(0.0, 0.0, alts, 123.0)
    ub, vb = b.sample_uv(0.0, 0.0, alts, 123.0)
    uc, vc = c.sample_uv(0.0, 0.0, alts, 123.0)
    assert np.array_equal(ua, ub) and np.array_equal(va, vb)
    assert not np.array_equal(ua, uc)


def test_layer_drift_rates_change_the_wind_over_time():
    model = LayeredWindModel([WindLayer(20000.0, 0.0, 5.0, math.inf, bearing_rate=0.01, speed_rate=0.01)])
    w0 = model.sample_wind(0.0, 0.0, 20000.0, 0.0)
    w60 = model.sample_wind(0.0, 0.0, 20000.0, 60.0)
    assert w60.bearing == pytest.approx(0.6)
    assert w60.speed == pytest.approx(5.6)
    assert w0.speed == pytest.approx(5.0)


# ------------------- forecast -------------------

def test_zero_noise_forecast_equals_truth(favorable):
    forecast = ForecastModel(favorable, seed=3)
    assert forecast.is_exact
    for x, y, t in [(0.0, 0.0, 0.0), (40.0, -90.0, 77.0), (-120.0, 5.0, 1440.0)]:
        truth = favorable.sample_column(x, y, t, 13)
        seen = forecast.sample_column(x, y, t, 13)
        assert np.array_equal(truth.bearings, seen.bearings)
        assert np.array_equal(truth.speeds, seen.speeds)


def test_clamped_speed_never_exceeds_v_max_and_is_stable():
    bearings = np.linspace(0.0, 2.0 * math.pi, 2000, endpoint=False)
    speeds = np.linspace(50.0, 95.0, 2000)
    u, v = clamp_speed(speeds * np.sin(bearings), speeds * np.cos(bearings), 50.0)
    assert (np.hypot(u, v) <= 50.0).all()
    again_u, again_v = clamp_speed(u, v, 50.0)
    assert np.array_equal(u, again_u) and np.array_equal(v, again_v)


def test_zero_noise_forecast_matches_a_clamped_truth_bit_for_bit():
    layers = [
        WindLayer(15000.0, 0.3, 80.0, 5000.0),
        WindLayer(20000.0, 2.1, 91.5, 5000.0),
        WindLayer(25000.0, 4.4, 87.25, 5000.0),
    ]
    truth = LayeredWindModel(layers, v_max=50.0, bearing_modulation_rad=1.3, seed=2)
    forecast = ForecastModel(truth, seed=4)
    for t in np.linspace(0.0, 1440.0, 40):
        a = truth.sample_column(0.0, 0.0, float(t), 51)
        b = forecast.sample_column(0.0, 0.0, float(t), 51)
        assert np.array_equal(a.bearings, b.bearings)
        assert np.array_equal(a.speeds, b.speeds)
        assert (a.speeds <= 50.0).all()


def test_noisy_forecast_is_deterministic_and_differs_from_truth(favorable):
    a = ForecastModel(favorable, bearing_noise_sd=0.2, speed_noise_sd=1.5, seed=9)
    b = ForecastModel(favorable, bearing_noise_sd=0.2, speed_noise_sd=1.5, seed=9)
    truth = favorable.sample_column(0.0, 0.0, 30.0, 11)
    ca = a.sample_column(0.0, 0.0, 30.0, 11)
    cb = b.sample_column(0.0, 0.0, 30.0, 11)
    assert np.array_equal(ca.bearings, cb.bearings)
    assert np.array_equal(ca.speeds, cb.speeds)
    assert not np.allclose(ca.bearings, truth.bearings)


def test_forecast_error_is_smooth_in_altitude(favorable):
    forecast = ForecastModel(favorable, bearing_noise_sd=0.2, speed_noise_sd=0.0, corr_length_m=2500.0, seed=1)
    db_near, _ = forecast._offsets(np.array([20000.0, 20010.0]), 0.0)
    # 10 m apart is far inside the correlation length
    assert abs(db_near[1] - db_near[0]) < 0.01


# ------------------- gridded -------------------

def _write_grid(path):
    xs, ys, zs, ts = [-100.0, 100.0], [-100.0, 100.0], [15000.0, 25000.0], [0.0, 60.0]
    shape = (2, 2, 2, 2)
    u = np.full(shape, 3.0)
    u[:, :, 1, :] = 5.0
    v = np.zeros(shape)
    save_gridded_wind(path, xs, ys, zs, ts, u, v)
    return path


def test_gridded_interpolates_linearly(tmp_path):
    model = load_gridded_wind(_write_grid(tmp_path / "wind.txt"))
    w = model.sample_wind(0.0, 0.0, 20000.0, 30.0)
    assert w.speed == pytest.approx(4.0)
    assert w.bearing == pytest.approx(0.5 * math.pi)
    # outside the horizontal grid the query clamps to the edge
    far = model.sample_wind(500.0, -500.0, 15000.0, 0.0)
    assert far.speed == pytest.approx(3.0)


def test_gridded_horizon(tmp_path):
    model = load_gridded_wind(_write_grid(tmp_path / "wind.txt"))
    assert model.horizon_minutes == 60.0
    assert not model.exhausted(59.0)
    assert model.exhausted(60.0)


def test_build_gridded_from_spec(tmp_path):
    path = _write_grid(tmp_path / "wind.txt")
    model = build_wind_model(WindSpec(kind=WindKind.GRIDDED, path=str(path)), episode_seed=0)
    assert model.sample_wind(0.0, 0.0, 25000.0, 0.0).speed == pytest.approx(5.0)


def test_gridded_missing_file(tmp_path):
    with pytest.raises(WindParseError):
        load_gridded_wind(tmp_path / "nope.txt")


@pytest.mark.parametrize(
    "body, line, field",
    [
        ("1 2\n", 1, "x"),
        ("axis x: 0 1\naxis y: 0 1\naxis z: 15000 15000\n", 3, "z"),
        ("axis x: 0 1\naxis y: 0 1\naxis z: 15000 25000\naxis t: 0 1\nabc 1\n", 5, "u"),
        ("axis x: 0 1\naxis y: 0 1\naxis z: 15000 25000\naxis t: 0 1\n1 1\naxis x: 0 2\n", 6, None),
        ("axis x: 0\n", 1, "x"),
    ],
)
def test_gridded_parse_errors_name_line_and_field(tmp_path, body, line, field):
    p = tmp_path / "bad.txt"
    p.write_text(body, encoding="utf-8")
    with pytest.raises(WindParseError) as exc:
        load_gridded_wind(p)
    assert exc.value.line == line
    assert exc.value.field == field


def test_gridded_cell_count_mismatch(tmp_path):
    p = tmp_path / "short.txt"
    p.write_text("axis x: 0 1\naxis y: 0 1\naxis z: 15000 25000\naxis t: 0 1\n1 1\n", encoding="utf-8")
    with pytest.raises(WindParseError, match="expected 16 cells"):
        load_gridded_wind(p)


# ------------------- scenarios -------------------

def test_uniform_scenario_blows_one_way_everywhere():
    model = build_wind_model(WindSpec(kind=WindKind.UNIFORM, bearing_deg=90.0, speed_mps=6.0), episode_seed=0)
    column = model.sample_column(0.0, 0.0, 0.0, 7)
    assert np.allclose(column.bearings, 0.5 * math.pi)
    assert np.allclose(column.speeds, 6.0)


def test_random_scenario_depends_on_episode_seed():
    spec = WindSpec(kind=WindKind.RANDOM, n_layers=5)
    a = build_wind_model(spec, episode_seed=1).sample_column(0.0, 0.0, 0.0, 9)
    b = build_wind_model(spec, episode_seed=1).sample_column(0.0, 0.0, 0.0, 9)
    c = build_wind_model(spec, episode_seed=2).sample_column(0.0, 0.0, 0.0, 9)
    assert np.array_equal(a.bearings, b.bearings)
    assert not np.array_equal(a.bearings, c.bearings)
