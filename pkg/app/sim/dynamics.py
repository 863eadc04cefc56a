# app/sim/dynamics.py
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, Protocol, Tuple

import numpy as np

from app.models import ALT_MAX_M, ALT_MIN_M, Action
from app.sim.windfield import WindModel

# (mean, sd) of the vertical rate in m/s for each altitude command
VERTICAL_RATES: Dict[Action, Tuple[float, float]] = {
    Action.ASCEND: (1.80, 0.14),
    Action.MAINTAIN: (0.00, 1.25),
    Action.DESCEND: (-2.80, 0.30),
}


class NormalSource(Protocol):
    def normal(self, loc: float, scale: float) -> float: ...


@dataclass(frozen=True)
class AgentState:
    agent_id: int
    x: float  # km east of the coverage center
    y: float  # km north of the coverage center
    altitude: float  # m

    @property
    def distance(self) -> float:
        return math.hypot(self.x, self.y)


def vertical_rate(action: Action, rng: NormalSource) -> float:
    mean, sd = VERTICAL_RATES[Action(action)]
    return float(rng.normal(mean, sd))


def step_agent(
    state: AgentState,
    action: Action,
    truth: WindModel,
    t: float,
    rng: NormalSource,
    step_seconds: float = 60.0,
) -> AgentState:
    """Advance one balloon by one tick: explicit Euler on the pre-step wind."""
    u, v = truth.sample_uv(state.x, state.y, [state.altitude], t)
    dz = vertical_rate(action, rng) * step_seconds
    altitude = min(max(state.altitude + dz, ALT_MIN_M), ALT_MAX_M)
    return replace(
        state,
        x=state.x + float(u[0]) * step_seconds / 1000.0,
        y=state.y + float(v[0]) * step_seconds / 1000.0,
        altitude=altitude,
    )


def within_coverage(state: AgentState, r_coverage: float) -> bool:
    return math.hypot(state.x, state.y) <= r_coverage


def positions(states) -> np.ndarray:
    return np.array([[s.x, s.y] for s in states], dtype=np.float64).reshape(-1, 2)
