# app/qmix/__init__.py
"""
QMIX value decomposition: networks, replay, learner, training loop, checkpoints.
"""

from __future__ import annotations

from .buffer import ReplayBuffer, Transition
from .checkpoint import learner_from_checkpoint, load_checkpoint, save_checkpoint
from .learner import QmixLearner, epsilon_greedy, linear_schedule
from .networks import AgentNetwork, MixingNetwork
from .trainer import QmixController, Trainer, TrainResult

__all__ = [
    "AgentNetwork",
    "MixingNetwork",
    "ReplayBuffer",
    "Transition",
    "QmixLearner",
    "epsilon_greedy",
    "linear_schedule",
    "save_checkpoint",
    "load_checkpoint",
    "learner_from_checkpoint",
    "QmixController",
    "Trainer",
    "TrainResult",
]
