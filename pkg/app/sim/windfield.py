# app/sim/windfield.py
"""
Truth and forecast wind fields over (x km, y km, altitude m, t minutes).

Winds are carried internally as (east, north) components in m/s; bearings are the
direction the air mass moves toward, clockwise from north, in [0, 2π).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from app.core.errors import WindDomainError, WindParseError
from app.core.logging import get_logger
from app.core.rng import Purpose, stream
from app.models import ALT_MAX_M, ALT_MIN_M, WindKind, WindSpec

log = get_logger("hab-coverage.wind")

TWO_PI = 2.0 * math.pi
DEFAULT_V_MAX = 50.0


@dataclass(frozen=True)
class WindSample:
    bearing: float
    speed: float


@dataclass(frozen=True)
class WindColumn:
    altitudes: np.ndarray
    bearings: np.ndarray
    speeds: np.ndarray

    def __len__(self) -> int:
        return int(self.altitudes.shape[0])

    @property
    def levels(self) -> List[Tuple[float, WindSample]]:
        return [
            (float(a), WindSample(float(b), float(s)))
            for a, b, s in zip(self.altitudes, self.bearings, self.speeds)
        ]


# ------------------- vector helpers -------------------

def to_components(bearing: np.ndarray, speed: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return speed * np.sin(bearing), speed * np.cos(bearing)


def to_bearing_speed(u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    speed = np.hypot(u, v)
    bearing = np.mod(np.arctan2(u, v), TWO_PI)
    # mod can round up to exactly 2π for tiny negative angles
    bearing = np.where(bearing >= TWO_PI, 0.0, bearing)
    return bearing, speed


def clamp_speed(u: np.ndarray, v: np.ndarray, v_max: float) -> Tuple[np.ndarray, np.ndarray]:
    """Rescale vectors faster than ``v_max``; the result never exceeds it, so clamping twice is a no-op."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    speed = np.hypot(u, v)
    over = speed > v_max
    if not np.any(over):
        return u, v
    scale = np.where(over, v_max / np.where(over, speed, 1.0), 1.0)
    cu, cv = u * scale, v * scale
    # v_max / speed can round so the rescaled vector lands an ulp above v_max
    still_over = np.hypot(cu, cv) > v_max
    while np.any(still_over):
        scale = np.where(still_over, np.nextafter(scale, 0.0), scale)
        cu, cv = u * scale, v * scale
        still_over = np.hypot(cu, cv) > v_max
    return cu, cv


def level_altitudes(n_levels: int) -> np.ndarray:
    if n_levels < 2:
        raise WindDomainError(f"n_levels must be >= 2, got {n_levels}")
    return np.linspace(ALT_MIN_M, ALT_MAX_M, n_levels)


def _check_query(x: float, y: float, altitudes: np.ndarray, t: float) -> None:
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(t)):
        raise WindDomainError(f"non-finite wind query (x={x}, y={y}, t={t})")
    if not np.all(np.isfinite(altitudes)):
        raise WindDomainError("non-finite altitude in wind query")
    lo, hi = float(np.min(altitudes)), float(np.max(altitudes))
    if lo < ALT_MIN_M or hi > ALT_MAX_M:
        bad = lo if lo < ALT_MIN_M else hi
        raise WindDomainError(
            f"altitude {bad:.1f} m outside [{ALT_MIN_M:.0f}, {ALT_MAX_M:.0f}] m",
            altitude=bad,
        )


class WindModel:
    """Base class: subclasses implement ``_uv`` on a validated altitude array."""

    v_max: float = DEFAULT_V_MAX
    # minutes of data available; None when the model never runs out
    horizon_minutes: Optional[float] = None

    def _uv(self, x: float, y: float, altitudes: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def sample_uv(self, x: float, y: float, altitudes, t: float) -> Tuple[np.ndarray, np.ndarray]:
        alts = np.atleast_1d(np.asarray(altitudes, dtype=np.float64))
        _check_query(float(x), float(y), alts, float(t))
        u, v = self._uv(float(x), float(y), alts, float(t))
        return clamp_speed(u, v, self.v_max)

    def sample_wind(self, x: float, y: float, altitude: float, t: float) -> WindSample:
        u, v = self.sample_uv(x, y, [altitude], t)
        bearing, speed = to_bearing_speed(u, v)
        return WindSample(float(bearing[0]), float(speed[0]))

    def sample_column(self, x: float, y: float, t: float, n_levels: int) -> WindColumn:
        alts = level_altitudes(n_levels)
        u, v = self.sample_uv(x, y, alts, t)
        bearing, speed = to_bearing_speed(u, v)
        return WindColumn(alts, bearing, speed)

    def exhausted(self, t: float) -> bool:
        return self.horizon_minutes is not None and t >= self.horizon_minutes


def sample_wind(model: WindModel, x: float, y: float, altitude: float, t: float) -> WindSample:
    return model.sample_wind(x, y, altitude, t)


def sample_column(model: WindModel, x: float, y: float, t: float, n_levels: int) -> WindColumn:
    return model.sample_column(x, y, t, n_levels)


# ------------------- layered (procedural) model -------------------

@dataclass(frozen=True)
class WindLayer:
    center_altitude_m: float
    bearing_rad: float
    speed_mps: float
    vertical_extent_m: float
    bearing_rate: float = 0.0  # rad / min
    speed_rate: float = 0.0  # m/s / min


class LayeredWindModel(WindModel):
    """
    Horizontally homogeneous stack of wind layers.

    Each layer contributes its (east, north) vector with a triangular altitude weight
    ``max(0, 1 - |z - center| / extent)``; the blend is the weight-normalized sum.
    Adjacent layers spaced exactly one extent apart give plain linear interpolation
    between layer centers.
    """

    def __init__(
        self,
        layers: Sequence[WindLayer],
        *,
        seed: int = 0,
        v_max: float = DEFAULT_V_MAX,
        modulation_period_min: float = 720.0,
        bearing_modulation_rad: float = 0.0,
        speed_modulation_mps: float = 0.0,
    ) -> None:
        if not layers:
            raise WindDomainError("layered wind model needs at least one layer")
        self.layers: Tuple[WindLayer, ...] = tuple(layers)
        self.seed = int(seed)
        self.v_max = float(v_max)
        self.modulation_period_min = float(modulation_period_min)
        self.bearing_modulation_rad = float(bearing_modulation_rad)
        self.speed_modulation_mps = float(speed_modulation_mps)

        self._centers = np.array([l.center_altitude_m for l in self.layers], dtype=np.float64)
        self._extents = np.array([l.vertical_extent_m for l in self.layers], dtype=np.float64)
        self._bearings = np.array([l.bearing_rad for l in self.layers], dtype=np.float64)
        self._speeds = np.array([l.speed_mps for l in self.layers], dtype=np.float64)
        self._bearing_rates = np.array([l.bearing_rate for l in self.layers], dtype=np.float64)
        self._speed_rates = np.array([l.speed_rate for l in self.layers], dtype=np.float64)
        self._phases = stream(self.seed, Purpose.WIND).uniform(0.0, TWO_PI, size=len(self.layers))
        self._check_coverage()

    def _weights(self, altitudes: np.ndarray) -> np.ndarray:
        return np.clip(1.0 - np.abs(altitudes[:, None] - self._centers[None, :]) / self._extents, 0.0, None)

    def _check_coverage(self) -> None:
        # total weight is continuous, so a zero region always touches a kernel edge or a band edge
        edges = np.concatenate([self._centers - self._extents, self._centers + self._extents])
        edges = edges[np.isfinite(edges) & (edges >= ALT_MIN_M) & (edges <= ALT_MAX_M)]
        probes = np.concatenate([[ALT_MIN_M, ALT_MAX_M], edges])
        if np.any(self._weights(probes).sum(axis=1) <= 0.0):
            raise WindDomainError(
                f"wind layers leave part of [{ALT_MIN_M:.0f}, {ALT_MAX_M:.0f}] m with zero weight"
            )

    def _layer_vectors(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        omega = TWO_PI * t / self.modulation_period_min
        bearings = (
            self._bearings
            + self._bearing_rates * t
            + self.bearing_modulation_rad * np.sin(omega + self._phases)
        )
        speeds = np.maximum(
            0.0,
            self._speeds
            + self._speed_rates * t
            + self.speed_modulation_mps * np.cos(omega + self._phases),
        )
        return to_components(bearings, speeds)

    def _uv(self, x, y, altitudes, t):
        weights = self._weights(altitudes)
        total = weights.sum(axis=1)
        lu, lv = self._layer_vectors(t)
        return (weights @ lu) / total, (weights @ lv) / total


# ------------------- forecast model -------------------

class ForecastModel(WindModel):
    """
    Truth model seen through a structured forecast error.

    Bearing and speed offsets are sums of a few low-frequency sinusoids in altitude
    (wavelengths around ``2π·corr_length``) whose phases drift slowly in time, so
    errors are smooth along the column rather than independent per query.
    """

    N_MODES = 4

    def __init__(
        self,
        base: WindModel,
        *,
        bearing_noise_sd: float = 0.0,
        speed_noise_sd: float = 0.0,
        corr_length_m: float = 2500.0,
        seed: int = 0,
    ) -> None:
        self.base = base
        self.v_max = base.v_max
        self.horizon_minutes = base.horizon_minutes
        self.bearing_noise_sd = float(bearing_noise_sd)
        self.speed_noise_sd = float(speed_noise_sd)
        self.corr_length_m = float(corr_length_m)
        self.seed = int(seed)

        rng = stream(self.seed, Purpose.FORECAST)
        k = self.N_MODES
        self._wavenumbers = rng.uniform(0.5, 1.5, size=(2, k)) / self.corr_length_m
        self._phases = rng.uniform(0.0, TWO_PI, size=(2, k))
        self._periods = rng.uniform(360.0, 1440.0, size=(2, k))
        # sum of k unit-variance-normalized sinusoids has variance 1
        self._amp = math.sqrt(2.0 / k)

    @property
    def is_exact(self) -> bool:
        return self.bearing_noise_sd == 0.0 and self.speed_noise_sd == 0.0

    def sample_uv(self, x, y, altitudes, t):
        if self.is_exact:
            return self.base.sample_uv(x, y, altitudes, t)
        return super().sample_uv(x, y, altitudes, t)

    def _offsets(self, altitudes: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
        arg = (
            altitudes[:, None, None] * self._wavenumbers[None, :, :]
            + self._phases[None, :, :]
            + TWO_PI * t / self._periods[None, :, :]
        )
        modes = self._amp * np.sin(arg).sum(axis=2)
        return self.bearing_noise_sd * modes[:, 0], self.speed_noise_sd * modes[:, 1]

    def _uv(self, x, y, altitudes, t):
        u, v = self.base.sample_uv(x, y, altitudes, t)
        if self.is_exact:
            return u, v
        bearing, speed = to_bearing_speed(u, v)
        db, ds = self._offsets(altitudes, t)
        return to_components(bearing + db, np.maximum(0.0, speed + ds))


# ------------------- gridded model -------------------

class GriddedWindModel(WindModel):
    """Multilinear interpolation over an (x, y, z, t) grid; queries clamp to the grid."""

    def __init__(
        self,
        xs: np.ndarray,
        ys: np.ndarray,
        zs: np.ndarray,
        ts: np.ndarray,
        u: np.ndarray,
        v: np.ndarray,
        *,
        v_max: float = DEFAULT_V_MAX,
        source: Optional[str] = None,
    ) -> None:
        self.axes = tuple(np.asarray(a, dtype=np.float64) for a in (xs, ys, zs, ts))
        self.u = np.asarray(u, dtype=np.float64)
        self.v = np.asarray(v, dtype=np.float64)
        self.v_max = float(v_max)
        self.source = source
        self.horizon_minutes = float(self.axes[3][-1])
        self._interp_u = RegularGridInterpolator(self.axes, self.u, method="linear")
        self._interp_v = RegularGridInterpolator(self.axes, self.v, method="linear")

    def _uv(self, x, y, altitudes, t):
        xs, ys, zs, ts = self.axes
        n = altitudes.shape[0]
        points = np.empty((n, 4), dtype=np.float64)
        points[:, 0] = min(max(x, xs[0]), xs[-1])
        points[:, 1] = min(max(y, ys[0]), ys[-1])
        points[:, 2] = np.clip(altitudes, zs[0], zs[-1])
        points[:, 3] = min(max(t, ts[0]), ts[-1])
        return self._interp_u(points), self._interp_v(points)


_AXIS_NAMES = ("x", "y", "z", "t")


def _parse_float(token: str, line_no: int, field_name: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise WindParseError(f"not a number: {token!r}", line=line_no, field=field_name) from None
    if not math.isfinite(value):
        raise WindParseError(f"non-finite value {token!r}", line=line_no, field=field_name)
    return value


def load_gridded_wind(path: Union[str, Path], *, v_max: float = DEFAULT_V_MAX) -> GriddedWindModel:
    """
    Parse the line-oriented gridded wind format.

    Header lines ``axis <name>: v1 v2 ...`` for x, y (km), z (m) and t (min), then one
    ``u v`` line per cell in x-major order. ``#`` starts a comment.
    """
    p = Path(path)
    if not p.exists():
        raise WindParseError(f"wind file not found: {p}")

    axes: Dict[str, np.ndarray] = {}
    cells: List[Tuple[float, float]] = []
    last_line = 0
    with open(p, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            last_line = line_no
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("axis"):
                if cells:
                    raise WindParseError("axis header after cell data", line=line_no)
                head, sep, values = line.partition(":")
                parts = head.split()
                if not sep or len(parts) != 2 or parts[1] not in _AXIS_NAMES:
                    raise WindParseError(f"malformed axis header {line!r}", line=line_no)
                name = parts[1]
                if name in axes:
                    raise WindParseError("duplicate axis", line=line_no, field=name)
                grid = np.array([_parse_float(tok, line_no, name) for tok in values.split()])
                if grid.size < 2:
                    raise WindParseError("axis needs at least 2 points", line=line_no, field=name)
                if np.any(np.diff(grid) <= 0.0):
                    raise WindParseError("axis values must be strictly increasing", line=line_no, field=name)
                axes[name] = grid
                continue

            missing = [a for a in _AXIS_NAMES if a not in axes]
            if missing:
                raise WindParseError(f"cell data before axis {missing[0]!r} header", line=line_no, field=missing[0])
            tokens = line.split()
            if len(tokens) != 2:
                raise WindParseError(f"expected 'u v', got {len(tokens)} fields", line=line_no)
            cells.append((_parse_float(tokens[0], line_no, "u"), _parse_float(tokens[1], line_no, "v")))

    missing = [a for a in _AXIS_NAMES if a not in axes]
    if missing:
        raise WindParseError(f"missing axis {missing[0]!r} header", line=last_line, field=missing[0])
    shape = tuple(axes[a].size for a in _AXIS_NAMES)
    expected = int(np.prod(shape))
    if len(cells) != expected:
        raise WindParseError(f"expected {expected} cells for grid {shape}, found {len(cells)}", line=last_line)

    data = np.asarray(cells, dtype=np.float64)
    log.debug("Loaded gridded wind %s with grid %s", p, shape)
    return GriddedWindModel(
        axes["x"], axes["y"], axes["z"], axes["t"],
        data[:, 0].reshape(shape), data[:, 1].reshape(shape),
        v_max=v_max, source=str(p),
    )


def save_gridded_wind(
    path: Union[str, Path],
    xs: Sequence[float],
    ys: Sequence[float],
    zs: Sequence[float],
    ts: Sequence[float],
    u: np.ndarray,
    v: np.ndarray,
) -> None:
    shape = (len(xs), len(ys), len(zs), len(ts))
    u = np.asarray(u, dtype=np.float64).reshape(shape)
    v = np.asarray(v, dtype=np.float64).reshape(shape)
    with open(path, "w", encoding="utf-8") as f:
        f.write("# hab-coverage gridded wind: u v (east, north) m/s, x-major order\n")
        for name, values in zip(_AXIS_NAMES, (xs, ys, zs, ts)):
            f.write(f"axis {name}: " + " ".join(f"{float(a):.6g}" for a in values) + "\n")
        for uu, vv in zip(u.ravel(), v.ravel()):
            f.write(f"{uu:.6g} {vv:.6g}\n")


@lru_cache(maxsize=8)
def _cached_gridded(path: str, v_max: float) -> GriddedWindModel:
    return load_gridded_wind(path, v_max=v_max)


# ------------------- scenarios -------------------

def favorable_layers(speed_mps: float) -> List[WindLayer]:
    """Four layers whose bearings cover the compass: every drift direction is reachable."""
    centers = (16000.0, 18500.0, 21000.0, 23500.0)
    bearings = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
    return [WindLayer(c, b, speed_mps, 2500.0) for c, b in zip(centers, bearings)]


def random_layers(rng: np.random.Generator, n_layers: int, speed_mps: float) -> List[WindLayer]:
    spacing = (ALT_MAX_M - ALT_MIN_M) / max(n_layers - 1, 1)
    centers = np.linspace(ALT_MIN_M, ALT_MAX_M, n_layers) if n_layers > 1 else np.array([20000.0])
    extent = spacing if n_layers > 1 else math.inf
    layers = []
    for c in centers:
        layers.append(
            WindLayer(
                center_altitude_m=float(c),
                bearing_rad=float(rng.uniform(0.0, TWO_PI)),
                speed_mps=float(rng.uniform(0.25, 1.75) * speed_mps),
                vertical_extent_m=float(extent),
                bearing_rate=float(rng.normal(0.0, 2e-4)),
                speed_rate=float(rng.normal(0.0, 1e-3)),
            )
        )
    return layers


def build_wind_model(spec: WindSpec, episode_seed: int, *, v_max: float = DEFAULT_V_MAX) -> WindModel:
    if spec.kind == WindKind.GRIDDED:
        return _cached_gridded(str(spec.path), float(v_max))

    seed = spec.seed
    if spec.kind == WindKind.FAVORABLE:
        layers = favorable_layers(spec.speed_mps)
    elif spec.kind == WindKind.UNIFORM:
        layers = [WindLayer(20000.0, math.radians(spec.bearing_deg), spec.speed_mps, math.inf)]
    elif spec.kind == WindKind.RANDOM:
        seed = int(episode_seed)
        layers = random_layers(stream(seed, Purpose.WIND, 1), spec.n_layers, spec.speed_mps)
    else:
        layers = [
            WindLayer(
                l.center_altitude_m,
                math.radians(l.bearing_deg),
                l.speed_mps,
                l.vertical_extent_m,
                math.radians(l.bearing_rate_deg_per_min),
                l.speed_rate_mps_per_min,
            )
            for l in spec.layers
        ]
    return LayeredWindModel(
        layers,
        seed=seed,
        v_max=v_max,
        modulation_period_min=spec.modulation_period_min,
        bearing_modulation_rad=math.radians(spec.bearing_modulation_deg),
        speed_modulation_mps=spec.speed_modulation_mps,
    )
