# app/qmix/buffer.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from app.core.errors import UsageError


@dataclass(frozen=True)
class Transition:
    observations: np.ndarray  # (n_agents, obs_dim)
    state: np.ndarray  # (state_dim,)
    actions: np.ndarray  # (n_agents,)
    reward: float
    next_observations: np.ndarray
    next_state: np.ndarray
    terminal: bool
    step: int


class ReplayBuffer:
    """
    Step-level ring buffer over preallocated numpy arrays.

    Storage is created on the first insert; ``np.zeros`` pages are only touched as
    they fill, so a 10^6 capacity costs memory in proportion to what is stored.
    """

    def __init__(self, capacity: int, n_agents: int, obs_dim: int, state_dim: int) -> None:
        if capacity < 1:
            raise UsageError(f"buffer capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self.n_agents = n_agents
        self.obs_dim = obs_dim
        self.state_dim = state_dim
        self._data: Optional[Dict[str, np.ndarray]] = None
        self._next = 0
        self._size = 0
        self.total_added = 0

    def __len__(self) -> int:
        return self._size

    def _allocate(self) -> None:
        c, n = self.capacity, self.n_agents
        self._data = {
            "observations": np.zeros((c, n, self.obs_dim), dtype=np.float32),
            "state": np.zeros((c, self.state_dim), dtype=np.float32),
            "actions": np.zeros((c, n), dtype=np.int64),
            "reward": np.zeros(c, dtype=np.float32),
            "next_observations": np.zeros((c, n, self.obs_dim), dtype=np.float32),
            "next_state": np.zeros((c, self.state_dim), dtype=np.float32),
            "terminal": np.zeros(c, dtype=np.float32),
            "step": np.zeros(c, dtype=np.int64),
        }

    def add(self, t: Transition) -> None:
        if self._data is None:
            self._allocate()
        i = self._next
        d = self._data
        d["observations"][i] = t.observations
        d["state"][i] = t.state
        d["actions"][i] = t.actions
        d["reward"][i] = t.reward
        d["next_observations"][i] = t.next_observations
        d["next_state"][i] = t.next_state
        d["terminal"][i] = float(t.terminal)
        d["step"][i] = t.step
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)
        self.total_added += 1

    def sample(self, batch_size: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        """Uniform sample with replacement over the stored records."""
        if self._size < batch_size:
            raise UsageError(f"buffer holds {self._size} records, batch needs {batch_size}")
        idx = rng.integers(0, self._size, size=batch_size)
        return {k: v[idx] for k, v in self._data.items()}

    def steps(self) -> np.ndarray:
        """Step indices currently stored, oldest first."""
        if self._data is None:
            return np.zeros(0, dtype=np.int64)
        if self._size < self.capacity:
            return self._data["step"][: self._size].copy()
        return np.roll(self._data["step"], -self._next).copy()
