# app/baseline/__init__.py
"""
Voronoi/Lloyd waypoint baseline with greedy altitude control.
"""

from __future__ import annotations

from .voronoi import (
    DiscPartition,
    VoronoiController,
    WaypointAssignment,
    assign_waypoints,
    greedy_altitude_action,
    lloyd_relax,
    run_baseline_episode,
)

__all__ = [
    "DiscPartition",
    "WaypointAssignment",
    "VoronoiController",
    "lloyd_relax",
    "assign_waypoints",
    "greedy_altitude_action",
    "run_baseline_episode",
]
