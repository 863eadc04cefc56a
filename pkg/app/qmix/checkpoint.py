# app/qmix/checkpoint.py
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional, Union

import torch

from app.core.errors import CheckpointError
from app.core.logging import get_logger
from app.models import EnvConfig, TrainConfig
from app.qmix.learner import QmixLearner

log = get_logger("hab-coverage.checkpoint")

CHECKPOINT_FORMAT = "hab-coverage-qmix"
CHECKPOINT_VERSION = 1


def dims_of(env_cfg: EnvConfig) -> Dict[str, int]:
    return {"n_agents": env_cfg.n_agents, "obs_dim": env_cfg.obs_dim, "state_dim": env_cfg.state_dim}


def save_checkpoint(
    path: Union[str, Path],
    learner: QmixLearner,
    env_cfg: EnvConfig,
    train_cfg: TrainConfig,
    *,
    counters: Optional[Dict[str, Any]] = None,
    rng_states: Optional[Dict[str, Any]] = None,
) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "env_config": env_cfg.model_dump(mode="json"),
        "train_config": train_cfg.model_dump(mode="json"),
        "dims": dims_of(env_cfg),
        "learner": learner.get_state(),
        "counters": dict(counters or {}),
        "rng": dict(rng_states or {}),
    }
    tmp = p.with_suffix(p.suffix + ".tmp")
    torch.save(payload, tmp)
    tmp.replace(p)
    log.debug("Checkpoint written to %s", p)
    return p


def load_checkpoint(path: Union[str, Path], expected: Optional[EnvConfig] = None) -> Dict[str, Any]:
    """
    Read a checkpoint and, when ``expected`` is given, check that its network
    dimensions match that environment configuration.
    """
    p = Path(path)
    if not p.exists():
        raise CheckpointError(f"checkpoint not found: {p}")
    try:
        payload = torch.load(p, map_location="cpu", weights_only=False)
    except Exception as e:
        raise CheckpointError(f"unreadable checkpoint {p}: {e}") from None

    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{p} is not a hab-coverage checkpoint")
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            "unsupported checkpoint version",
            expected=CHECKPOINT_VERSION,
            found=payload.get("version"),
        )

    if expected is not None:
        want, have = dims_of(expected), payload["dims"]
        for key in ("n_agents", "obs_dim", "state_dim"):
            if want[key] != have.get(key):
                raise CheckpointError(
                    f"checkpoint {key} mismatch: expected {want[key]}, found {have.get(key)}",
                    expected=want[key],
                    found=have.get(key),
                )
    return payload


def learner_from_checkpoint(payload: Dict[str, Any], device: str = "cpu") -> QmixLearner:
    dims = payload["dims"]
    learner = QmixLearner(
        dims["n_agents"],
        dims["obs_dim"],
        dims["state_dim"],
        TrainConfig.model_validate(payload["train_config"]),
        device=device,
    )
    learner.load_state(payload["learner"])
    return learner
