# app/baseline/voronoi.py
"""
Deterministic comparator: disc-bounded Voronoi partition relaxed with Lloyd's
iterations gives each balloon a centroid waypoint; a greedy controller picks the
altitude whose forecast wind best carries the balloon toward it.

Decisions read only the forecast wind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from app.core.errors import UsageError
from app.core.logging import get_logger
from app.models import Action, BaselineConfig, EnvConfig
from app.sim.dynamics import AgentState, positions
from app.sim.environment import CoverageEnv
from app.sim.rollout import run_episode
from app.sim.trace import EpisodeTrace
from app.sim.windfield import WindColumn, WindModel

log = get_logger("hab-coverage.baseline")


@dataclass(frozen=True)
class DiscPartition:
    seeds: np.ndarray  # (n, 2) km, as given
    centroids: np.ndarray  # (n, 2) km, inside the disc
    iterations: int
    disc_radius: float
    # quantization energy before each iteration and after the last
    energies: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class WaypointAssignment:
    targets: np.ndarray  # (n, 2) km
    t: float  # minutes
    partition: DiscPartition


def disc_grid(disc_radius: float, resolution: float) -> np.ndarray:
    """Grid points inside the disc, symmetric about both axes."""
    k = int(math.floor(disc_radius / resolution))
    axis = np.arange(-k, k + 1, dtype=np.float64) * resolution
    gx, gy = np.meshgrid(axis, axis)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    return pts[np.hypot(pts[:, 0], pts[:, 1]) <= disc_radius]


def _to_boundary(p: np.ndarray, disc_radius: float) -> np.ndarray:
    norm = math.hypot(p[0], p[1])
    if norm == 0.0:
        return np.array([disc_radius, 0.0])
    return p * (disc_radius / norm)


def _project_inside(p: np.ndarray, disc_radius: float) -> np.ndarray:
    if math.hypot(p[0], p[1]) <= disc_radius:
        return p.copy()
    return _to_boundary(p, disc_radius)


def quantization_energy(points: np.ndarray, generators: np.ndarray) -> float:
    return float(np.sum(np.min(cdist(points, generators), axis=1) ** 2))


def lloyd_relax(
    seeds: Sequence[Sequence[float]],
    disc_radius: float,
    iterations: int = 20,
    grid_resolution: float = 2.0,
) -> DiscPartition:
    seeds_arr = np.asarray(seeds, dtype=np.float64).reshape(-1, 2)
    if seeds_arr.shape[0] == 0:
        raise UsageError("lloyd_relax needs at least one seed")
    if disc_radius <= 0.0:
        raise UsageError(f"disc radius must be positive, got {disc_radius}")

    pts = disc_grid(disc_radius, grid_resolution)
    current = np.array([_project_inside(s, disc_radius) for s in seeds_arr])
    energies = []
    for _ in range(iterations):
        dist = cdist(pts, current)
        # argmin returns the first minimum: ties go to the lowest agent index
        labels = np.argmin(dist, axis=1)
        energies.append(float(np.sum(dist[np.arange(pts.shape[0]), labels] ** 2)))
        nxt = np.empty_like(current)
        for i in range(current.shape[0]):
            members = pts[labels == i]
            nxt[i] = members.mean(axis=0) if members.shape[0] else _to_boundary(current[i], disc_radius)
        current = nxt
    energies.append(quantization_energy(pts, current))
    return DiscPartition(seeds_arr, current, iterations, float(disc_radius), np.asarray(energies))


def assign_waypoints(
    states: Sequence[AgentState],
    disc_radius: float,
    t: float,
    iterations: int = 20,
    grid_resolution: float = 2.0,
) -> WaypointAssignment:
    partition = lloyd_relax(positions(states), disc_radius, iterations, grid_resolution)
    return WaypointAssignment(partition.centroids.copy(), float(t), partition)


def greedy_altitude_action(
    state: AgentState,
    waypoint: Sequence[float],
    forecast: WindModel,
    t: float,
    n_levels: int = 37,
    *,
    column: Optional[WindColumn] = None,
    v_cap: float = 20.0,
    deadband_m: float = 250.0,
    arrival_km: float = 1.0,
) -> Action:
    dx, dy = float(waypoint[0]) - state.x, float(waypoint[1]) - state.y
    dist = math.hypot(dx, dy)
    if dist < arrival_km:
        return Action.MAINTAIN

    if column is None:
        column = forecast.sample_column(state.x, state.y, t, n_levels)
    ux, uy = dx / dist, dy / dist
    cosine = np.sin(column.bearings) * ux + np.cos(column.bearings) * uy
    scores = cosine * np.minimum(column.speeds, v_cap) / v_cap

    best = np.flatnonzero(scores == scores.max())
    # nearest to the current altitude first, then the lower one
    order = np.lexsort((column.altitudes[best], np.abs(column.altitudes[best] - state.altitude)))
    target = float(column.altitudes[best[order[0]]])

    if target > state.altitude + deadband_m:
        return Action.ASCEND
    if target < state.altitude - deadband_m:
        return Action.DESCEND
    return Action.MAINTAIN


class VoronoiController:
    """Refreshes waypoints every ``refresh_minutes``; acts greedily every step."""

    name = "voronoi"

    def __init__(self, cfg: Optional[BaselineConfig] = None) -> None:
        self.cfg = cfg or BaselineConfig()
        self.assignment: Optional[WaypointAssignment] = None
        self.partition_log: List[Tuple[float, int, float, float]] = []

    def begin_episode(self, env: CoverageEnv) -> None:
        self.assignment = None
        self.partition_log = []

    def _refresh(self, env: CoverageEnv) -> None:
        self.assignment = assign_waypoints(
            env.states,
            env.config.r_coverage,
            env.t_minutes,
            self.cfg.lloyd_iterations,
            self.cfg.grid_resolution_km,
        )
        for i, (wx, wy) in enumerate(self.assignment.targets):
            self.partition_log.append((env.t_minutes, i, float(wx), float(wy)))

    def act(self, env, observations, state):
        t = env.t_minutes
        if self.assignment is None or t - self.assignment.t >= self.cfg.refresh_minutes:
            self._refresh(env)
        return [
            int(
                greedy_altitude_action(
                    s,
                    self.assignment.targets[i],
                    env.forecast,
                    t,
                    env.config.n_levels,
                    column=env.forecast_column(i),
                    v_cap=self.cfg.v_cap_mps,
                    deadband_m=self.cfg.deadband_m,
                    arrival_km=self.cfg.arrival_km,
                )
            )
            for i, s in enumerate(env.states)
        ]


def run_baseline_episode(
    config: EnvConfig,
    seed: int,
    baseline: Optional[BaselineConfig] = None,
    truth: Optional[WindModel] = None,
) -> Tuple[EpisodeTrace, List[Tuple[float, int, float, float]]]:
    """One baseline episode; returns the trace and the per-refresh waypoint log."""
    env = CoverageEnv(config, truth=truth, record=True)
    controller = VoronoiController(baseline)
    trace = run_episode(env, controller, seed)
    return trace, list(controller.partition_log)
