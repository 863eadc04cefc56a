# app/sim/rollout.py
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Protocol, Sequence, TypeVar

import numpy as np

from app.core.errors import VerificationError
from app.core.logging import get_logger
from app.core.rng import Purpose, stream
from app.models import N_ACTIONS, Action
from app.sim.environment import CoverageEnv
from app.sim.trace import EpisodeTrace
from app.sim.windfield import WindModel

log = get_logger("hab-coverage.rollout")

T = TypeVar("T")


class Controller(Protocol):
    name: str

    def begin_episode(self, env: CoverageEnv) -> None: ...

    def act(self, env: CoverageEnv, observations: List[np.ndarray], state: np.ndarray) -> List[int]: ...


class RandomController:
    """Uniform random actions from a per-episode policy stream."""

    name = "random"

    def __init__(self, seed: int = 0) -> None:
        self.seed = int(seed)
        self._rng: Optional[np.random.Generator] = None

    def begin_episode(self, env: CoverageEnv) -> None:
        self._rng = stream(self.seed, Purpose.POLICY, int(env.episode_seed))

    def act(self, env, observations, state):
        return [int(a) for a in self._rng.integers(0, N_ACTIONS, size=env.n_agents)]


class ScriptedController:
    """Replays a fixed action sequence, one joint action per step."""

    def __init__(self, actions: np.ndarray, name: str = "replay") -> None:
        self.actions = np.asarray(actions, dtype=np.int64)
        self.name = name

    def begin_episode(self, env: CoverageEnv) -> None:
        pass

    def act(self, env, observations, state):
        return [int(a) for a in self.actions[env.step_index]]


def run_episode(env: CoverageEnv, controller: Controller, seed: int) -> EpisodeTrace:
    observations, state = env.reset(seed, controller=controller.name)
    controller.begin_episode(env)
    while not env.finished:
        actions = controller.act(env, observations, state)
        observations, state, _, _ = env.step(actions)
    log.debug(
        "Episode seed=%s controller=%s steps=%s return=%.3f",
        seed, controller.name, env.step_index, env.trace.episode_return if env.trace else float("nan"),
    )
    return env.trace


def replay_trace(trace: EpisodeTrace, truth: Optional[WindModel] = None) -> EpisodeTrace:
    """Re-simulate a trace from its recorded seed and config, re-applying its actions."""
    env = CoverageEnv(trace.config, truth=truth, record=True)
    controller = ScriptedController(trace.actions(), name=trace.controller)
    env.reset(trace.seed, controller=controller.name)
    while not env.finished and env.step_index < len(trace):
        env.step(controller.act(env, [], np.empty(0)))
    return env.trace


def verify_trace(recorded: EpisodeTrace, replayed: EpisodeTrace) -> None:
    """Raise VerificationError at the first step/agent where the two traces differ bit-wise."""
    for rec, rep in zip(recorded.steps, replayed.steps):
        for a, b in zip(rec.agents, rep.agents):
            if (a.x, a.y, a.altitude, a.action) != (b.x, b.y, b.altitude, b.action):
                raise VerificationError(
                    f"step {rec.t}, agent {a.agent_id}: recorded "
                    f"({a.x!r}, {a.y!r}, {a.altitude!r}) vs replayed ({b.x!r}, {b.y!r}, {b.altitude!r})",
                    step=rec.t,
                    agent_id=a.agent_id,
                )
        if (rec.reward, rec.coverage_ratio, rec.separation) != (rep.reward, rep.coverage_ratio, rep.separation):
            raise VerificationError(
                f"step {rec.t}: recorded team metrics "
                f"({rec.reward!r}, {rec.coverage_ratio!r}, {rec.separation!r}) vs replayed "
                f"({rep.reward!r}, {rep.coverage_ratio!r}, {rep.separation!r})",
                step=rec.t,
            )
    if len(recorded) != len(replayed):
        step = min(len(recorded), len(replayed)) + 1
        raise VerificationError(
            f"length mismatch: recorded {len(recorded)} steps, replayed {len(replayed)}", step=step
        )


def run_batch(job: Callable[[int], T], seeds: Sequence[int], workers: int = 1) -> List[T]:
    """Run ``job`` once per seed; results come back in seed-list order for any worker count."""
    if workers <= 1 or len(seeds) <= 1:
        return [job(seed) for seed in seeds]
    with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
        return list(pool.map(job, seeds))
