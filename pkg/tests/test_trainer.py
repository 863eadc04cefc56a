# tests/test_trainer.py
from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from app.baseline.voronoi import run_baseline_episode
from app.core.config_loader import load_run_config, read_seeds_file
from app.metrics.coverage import compute_twr
from app.models import EnvConfig
from app.qmix.checkpoint import load_checkpoint
from app.qmix.trainer import CURVE_COLUMNS, Trainer, evaluate_greedy, held_out_seeds
from app.sim.environment import CoverageEnv
from app.sim.rollout import RandomController, run_episode


@pytest.fixture
def env_cfg() -> EnvConfig:
    return EnvConfig(n_agents=2, n_levels=3, episode_steps=10)


def test_zero_steps_still_writes_outputs(tmp_path, env_cfg, tiny_train_cfg):
    cfg = tiny_train_cfg.model_copy(update={"total_steps": 0})
    result = Trainer(env_cfg, cfg, tmp_path / "run").run()
    assert result.env_steps == 0 and result.episodes == 0
    assert result.checkpoint_path.exists()
    assert result.metrics_path.read_text(encoding="utf-8").strip() == ",".join(CURVE_COLUMNS)


def test_learning_curve_rows(tmp_path, env_cfg, tiny_train_cfg):
    result = Trainer(env_cfg, tiny_train_cfg, tmp_path / "run").run()
    assert (result.env_steps, result.episodes) == (30, 3)
    curve = pd.read_csv(result.metrics_path)
    assert list(curve.columns) == CURVE_COLUMNS
    assert curve["step"].tolist() == [10, 20, 30]
    assert curve["episodes"].tolist() == [1, 2, 3]
    assert curve["mean_group_twr"].between(0.0, 1.0).all()
    assert curve["mean_separation_ratio"].between(0.0, 1.0).all()
    assert (curve["epsilon"].diff().dropna() < 0).all()
    payload = load_checkpoint(result.checkpoint_path, expected=env_cfg)
    assert payload["counters"] == {"env_steps": 30, "episodes": 3}


def test_training_is_reproducible(tmp_path, env_cfg, tiny_train_cfg):
    a = Trainer(env_cfg, tiny_train_cfg, tmp_path / "a").run()
    b = Trainer(env_cfg, tiny_train_cfg, tmp_path / "b").run()
    assert a.metrics_path.read_bytes() == b.metrics_path.read_bytes()


def test_resume_continues_the_step_index(tmp_path, env_cfg, tiny_train_cfg):
    first = Trainer(env_cfg, tiny_train_cfg.model_copy(update={"total_steps": 20}), tmp_path / "run").run()
    assert first.env_steps == 20

    resumed = Trainer(env_cfg, tiny_train_cfg.model_copy(update={"total_steps": 40}), tmp_path / "run2")
    result = resumed.run(resume_from=first.checkpoint_path)
    assert (result.env_steps, result.episodes) == (40, 4)
    assert pd.read_csv(result.metrics_path)["step"].tolist() == [10, 20, 30, 40]


def test_held_out_seeds_are_stable():
    assert held_out_seeds(3, 4) == held_out_seeds(3, 4)
    assert len(set(held_out_seeds(3, 4))) == 4
    assert held_out_seeds(3, 4) != held_out_seeds(4, 4)


@pytest.mark.slow
def test_desk_scale_training_beats_random_and_tracks_the_baseline(tmp_path):
    """Around 2e5 single-threaded training steps: under 30 min on a recent desktop CPU, nearer 50 min on a slow sandbox core."""
    configs = Path(__file__).resolve().parent.parent / "configs"
    cfg = load_run_config(configs / "desk_scale.ini")
    seeds = read_seeds_file(configs / "heldout_seeds.txt")

    trainer = Trainer(cfg.env, cfg.train, tmp_path / "desk")
    trainer.run()
    qmix = evaluate_greedy(trainer.learner, cfg.env, seeds)["mean_group_twr"]
    env = CoverageEnv(cfg.env)
    random_twr = float(np.mean([compute_twr(run_episode(env, RandomController(0), s)).group for s in seeds]))
    baseline = float(np.mean([compute_twr(run_baseline_episode(cfg.env, s, cfg.baseline)[0]).group for s in seeds]))

    assert qmix >= random_twr + 0.20
    assert qmix >= baseline - 0.15
