# app/qmix/learner.py
"""
QMIX learner: shared agent network, monotonic mixer, target copies, TD update.
"""

from __future__ import annotations

from typing import Any, Dict, List, Sequence

import numpy as np
import torch
import torch.nn.functional as F

from app.core.errors import UsageError
from app.core.logging import get_logger
from app.core.rng import Purpose, derive_seed
from app.models import N_ACTIONS, TrainConfig
from app.qmix.networks import AgentNetwork, MixingNetwork

log = get_logger("hab-coverage.qmix")


def linear_schedule(start: float, end: float, duration: int, t: int) -> float:
    """Linear from ``start`` at t=0 to ``end`` at t=duration, constant afterwards."""
    if t >= duration:
        return end
    return start + (end - start) * (t / duration)


def epsilon_greedy(q_values: np.ndarray, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """
    Per-agent ε-greedy over a (n_agents, n_actions) array.

    Both the coin and the random action are drawn on every call, so the stream
    advances identically whatever ε is. ``np.argmax`` resolves ties to the lowest
    action index.
    """
    n_agents, n_actions = q_values.shape
    coins = rng.random(n_agents)
    random_actions = rng.integers(0, n_actions, size=n_agents)
    greedy = np.argmax(q_values, axis=1)
    return np.where(coins < epsilon, random_actions, greedy).astype(np.int64)


class QmixLearner:
    def __init__(
        self,
        n_agents: int,
        obs_dim: int,
        state_dim: int,
        cfg: TrainConfig,
        *,
        device: str = "cpu",
        dtype: torch.dtype = torch.float32,
    ) -> None:
        self.n_agents = n_agents
        self.obs_dim = obs_dim
        self.state_dim = state_dim
        self.cfg = cfg
        self.device = torch.device(device)
        self.dtype = dtype

        torch.manual_seed(derive_seed(cfg.seed, Purpose.TORCH))
        self.agent = AgentNetwork(obs_dim, N_ACTIONS, cfg.hidden_dim).to(self.device, dtype)
        self.mixer = MixingNetwork(n_agents, state_dim, cfg.mixing_embed_dim, cfg.hypernet_hidden_dim).to(
            self.device, dtype
        )
        self.target_agent = AgentNetwork(obs_dim, N_ACTIONS, cfg.hidden_dim).to(self.device, dtype)
        self.target_mixer = MixingNetwork(n_agents, state_dim, cfg.mixing_embed_dim, cfg.hypernet_hidden_dim).to(
            self.device, dtype
        )
        self.update_targets()

        self.params = list(self.agent.parameters()) + list(self.mixer.parameters())
        self.optimizer = torch.optim.Adam(self.params, lr=cfg.learning_rate)
        self.gradient_steps = 0

    # ------------------- acting -------------------

    def _tensor(self, array: Any) -> torch.Tensor:
        return torch.as_tensor(np.asarray(array), dtype=self.dtype, device=self.device)

    @torch.no_grad()
    def q_values(self, observations: Sequence[np.ndarray]) -> np.ndarray:
        obs = self._tensor(np.stack(observations))
        return self.agent(obs).cpu().numpy()

    def select_actions(
        self, observations: Sequence[np.ndarray], epsilon: float, rng: np.random.Generator
    ) -> List[int]:
        return [int(a) for a in epsilon_greedy(self.q_values(observations), epsilon, rng)]

    def greedy_actions(self, observations: Sequence[np.ndarray]) -> List[int]:
        return [int(a) for a in np.argmax(self.q_values(observations), axis=1)]

    @torch.no_grad()
    def mix(self, qs: Sequence[float], state: np.ndarray) -> float:
        if len(qs) != self.n_agents:
            raise UsageError(f"mix expects {self.n_agents} Q-values, got {len(qs)}")
        q = self._tensor(qs).view(1, self.n_agents)
        s = self._tensor(state).view(1, self.state_dim)
        return float(self.mixer(q, s)[0])

    # ------------------- training -------------------

    def compute_loss(self, batch: Dict[str, np.ndarray]) -> torch.Tensor:
        obs = self._tensor(batch["observations"])
        state = self._tensor(batch["state"])
        actions = torch.as_tensor(batch["actions"], dtype=torch.long, device=self.device)
        reward = self._tensor(batch["reward"])
        next_obs = self._tensor(batch["next_observations"])
        next_state = self._tensor(batch["next_state"])
        terminal = self._tensor(batch["terminal"])

        chosen = self.agent(obs).gather(-1, actions.unsqueeze(-1)).squeeze(-1)  # (B, N)
        q_tot = self.mixer(chosen, state)

        with torch.no_grad():
            next_max = self.target_agent(next_obs).max(dim=-1).values
            target = reward + self.cfg.gamma * (1.0 - terminal) * self.target_mixer(next_max, next_state)

        return F.mse_loss(q_tot, target)

    def td_update(self, batch: Dict[str, np.ndarray]) -> float:
        if batch["reward"].shape[0] < 1:
            raise UsageError("empty training batch")
        loss = self.compute_loss(batch)
        self.optimizer.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(self.params, self.cfg.grad_clip)
        self.optimizer.step()

        self.gradient_steps += 1
        if self.gradient_steps % self.cfg.target_update_interval == 0:
            self.update_targets()
            log.debug("Target networks updated at gradient step %s", self.gradient_steps)
        return float(loss.detach())

    def update_targets(self) -> None:
        self.target_agent.load_state_dict(self.agent.state_dict())
        self.target_mixer.load_state_dict(self.mixer.state_dict())

    # ------------------- state -------------------

    def get_state(self) -> Dict[str, Any]:
        return {
            "agent": self.agent.state_dict(),
            "mixer": self.mixer.state_dict(),
            "target_agent": self.target_agent.state_dict(),
            "target_mixer": self.target_mixer.state_dict(),
            "optimizer": self.optimizer.state_dict(),
            "gradient_steps": self.gradient_steps,
        }

    def load_state(self, state: Dict[str, Any]) -> None:
        self.agent.load_state_dict(state["agent"])
        self.mixer.load_state_dict(state["mixer"])
        self.target_agent.load_state_dict(state["target_agent"])
        self.target_mixer.load_state_dict(state["target_mixer"])
        if state.get("optimizer") is not None:
            self.optimizer.load_state_dict(state["optimizer"])
        self.gradient_steps = int(state.get("gradient_steps", 0))
