# app/qmix/trainer.py
"""
Single-learner QMIX training loop.

One gradient step per environment step once warmup is over; every
``eval_every_episodes`` training episodes the greedy policy is scored on fixed
held-out seeds and a learning-curve row is appended to ``metrics.csv``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from app.core.logging import get_logger
from app.core.rng import Purpose, derive_seed, generator_state, restore_generator, stream
from app.metrics.coverage import compute_separation, compute_twr
from app.models import EnvConfig, TrainConfig
from app.qmix.buffer import ReplayBuffer, Transition
from app.qmix.checkpoint import load_checkpoint, save_checkpoint
from app.qmix.learner import QmixLearner, linear_schedule
from app.sim.environment import CoverageEnv
from app.sim.rollout import run_episode
from app.sim.windfield import WindModel

log = get_logger("hab-coverage.train")

CURVE_COLUMNS = ["step", "episodes", "mean_reward", "mean_group_twr", "mean_separation_ratio", "loss", "epsilon"]
CHECKPOINT_NAME = "checkpoint.pt"
CURVE_NAME = "metrics.csv"


class QmixController:
    """Greedy (ε = 0) decentralized execution of a trained agent network."""

    name = "qmix"

    def __init__(self, learner: QmixLearner) -> None:
        self.learner = learner

    def begin_episode(self, env: CoverageEnv) -> None:
        pass

    def act(self, env, observations, state):
        return self.learner.greedy_actions(observations)


def held_out_seeds(master_seed: int, n: int) -> List[int]:
    return [derive_seed(master_seed, Purpose.EVAL_EPISODE, k) for k in range(n)]


def evaluate_greedy(
    learner: QmixLearner,
    env_cfg: EnvConfig,
    seeds: List[int],
    truth: Optional[WindModel] = None,
) -> Dict[str, float]:
    env = CoverageEnv(env_cfg, truth=truth, record=True)
    controller = QmixController(learner)
    returns, twrs, seps = [], [], []
    for seed in seeds:
        trace = run_episode(env, controller, seed)
        returns.append(trace.episode_return)
        twrs.append(compute_twr(trace).group)
        seps.append(compute_separation(trace, "train"))
    return {
        "mean_reward": float(np.mean(returns)),
        "mean_group_twr": float(np.mean(twrs)),
        "mean_separation_ratio": float(np.mean(seps)),
    }


@dataclass
class TrainResult:
    checkpoint_path: Path
    metrics_path: Path
    curve: List[Dict[str, float]] = field(default_factory=list)
    env_steps: int = 0
    episodes: int = 0


class Trainer:
    def __init__(
        self,
        env_cfg: EnvConfig,
        train_cfg: TrainConfig,
        out_dir: Union[str, Path],
        *,
        device: str = "cpu",
        truth: Optional[WindModel] = None,
    ) -> None:
        self.env_cfg = env_cfg
        self.cfg = train_cfg
        self.out_dir = Path(out_dir)
        self.truth = truth
        self.env = CoverageEnv(env_cfg, truth=truth, record=False)
        self.learner = QmixLearner(env_cfg.n_agents, env_cfg.obs_dim, env_cfg.state_dim, train_cfg, device=device)
        self.buffer = ReplayBuffer(train_cfg.buffer_capacity, env_cfg.n_agents, env_cfg.obs_dim, env_cfg.state_dim)
        self.policy_rng = stream(train_cfg.seed, Purpose.POLICY)
        self.sampler_rng = stream(train_cfg.seed, Purpose.SAMPLER)
        self.eval_seeds = held_out_seeds(train_cfg.seed, train_cfg.eval_episodes)

        self.env_steps = 0
        self.episodes = 0
        self.curve: List[Dict[str, float]] = []
        self._losses: List[float] = []

    @property
    def checkpoint_path(self) -> Path:
        return self.out_dir / CHECKPOINT_NAME

    @property
    def metrics_path(self) -> Path:
        return self.out_dir / CURVE_NAME

    def epsilon(self) -> float:
        return linear_schedule(self.cfg.epsilon_start, self.cfg.epsilon_end, self.cfg.epsilon_decay_steps, self.env_steps)

    # ------------------- persistence -------------------

    def save(self) -> Path:
        return save_checkpoint(
            self.checkpoint_path,
            self.learner,
            self.env_cfg,
            self.cfg,
            counters={"env_steps": self.env_steps, "episodes": self.episodes},
            rng_states={
                "policy": generator_state(self.policy_rng),
                "sampler": generator_state(self.sampler_rng),
            },
        )

    def resume(self, path: Union[str, Path]) -> None:
        payload = load_checkpoint(path, expected=self.env_cfg)
        self.learner.load_state(payload["learner"])
        self.env_steps = int(payload["counters"].get("env_steps", 0))
        self.episodes = int(payload["counters"].get("episodes", 0))
        rng = payload.get("rng", {})
        if "policy" in rng:
            self.policy_rng = restore_generator(rng["policy"])
        if "sampler" in rng:
            self.sampler_rng = restore_generator(rng["sampler"])

        curve_file = Path(path).parent / CURVE_NAME
        if curve_file.exists():
            prior = pd.read_csv(curve_file)
            prior = prior[prior["step"] <= self.env_steps]
            self.curve = prior.to_dict(orient="records")
        log.warning(
            "Resumed from %s at env step %s (%s episodes); replay buffer starts empty",
            path, self.env_steps, self.episodes,
        )

    def write_curve(self) -> Path:
        self.metrics_path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(self.curve, columns=CURVE_COLUMNS).to_csv(self.metrics_path, index=False)
        return self.metrics_path

    # ------------------- loop -------------------

    def _evaluate(self) -> None:
        scores = evaluate_greedy(self.learner, self.env_cfg, self.eval_seeds, truth=self.truth)
        loss = float(np.mean(self._losses)) if self._losses else math.nan
        self._losses = []
        row = {"step": self.env_steps, "episodes": self.episodes, **scores, "loss": loss, "epsilon": self.epsilon()}
        self.curve.append(row)
        log.info(
            "step=%s episodes=%s reward=%.1f twr=%.3f sep=%.3f loss=%.4g eps=%.3f",
            self.env_steps, self.episodes, row["mean_reward"], row["mean_group_twr"],
            row["mean_separation_ratio"], loss, row["epsilon"],
        )
        self.write_curve()
        self.save()

    def _maybe_update(self) -> None:
        cfg = self.cfg
        if self.env_steps <= cfg.warmup_steps or len(self.buffer) < cfg.batch_size:
            return
        if self.env_steps % cfg.train_every != 0:
            return
        self._losses.append(self.learner.td_update(self.buffer.sample(cfg.batch_size, self.sampler_rng)))

    def run_episode(self) -> None:
        cfg = self.cfg
        env = self.env
        seed = derive_seed(cfg.seed, Purpose.TRAIN_EPISODE, self.episodes)
        observations, state = env.reset(seed, controller="qmix-train")
        while not env.finished and self.env_steps < cfg.total_steps:
            actions = self.learner.select_actions(observations, self.epsilon(), self.policy_rng)
            next_observations, next_state, reward, done = env.step(actions)
            ended = done or env.truncated
            self.buffer.add(
                Transition(
                    observations=np.stack(observations),
                    state=state,
                    actions=np.asarray(actions, dtype=np.int64),
                    reward=reward,
                    next_observations=np.stack(next_observations),
                    next_state=next_state,
                    # a time limit is not a terminal state unless bootstrapping is disabled
                    terminal=ended and not cfg.bootstrap_on_timeout,
                    step=env.step_index,
                )
            )
            self.env_steps += 1
            self._maybe_update()
            observations, state = next_observations, next_state

        if env.finished:
            self.episodes += 1
            if self.episodes % cfg.eval_every_episodes == 0:
                self._evaluate()

    def run(self, resume_from: Optional[Union[str, Path]] = None) -> TrainResult:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if resume_from is not None:
            self.resume(resume_from)
        log.info(
            "Training QMIX: agents=%s obs_dim=%s state_dim=%s total_steps=%s start_step=%s",
            self.env_cfg.n_agents, self.env_cfg.obs_dim, self.env_cfg.state_dim,
            self.cfg.total_steps, self.env_steps,
        )
        while self.env_steps < self.cfg.total_steps:
            self.run_episode()

        self.write_curve()
        self.save()
        return TrainResult(self.checkpoint_path, self.metrics_path, list(self.curve), self.env_steps, self.episodes)
