# app/qmix/networks.py
from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


class AgentNetwork(nn.Module):
    """Feed-forward per-agent Q-network; one instance is shared by every agent."""

    def __init__(self, obs_dim: int, n_actions: int = 3, hidden_dim: int = 256) -> None:
        super().__init__()
        self.obs_dim = obs_dim
        self.n_actions = n_actions
        self.hidden_dim = hidden_dim
        self.net = nn.Sequential(
            nn.Linear(obs_dim, hidden_dim),
            nn.ReLU(),
            nn.Linear(hidden_dim, hidden_dim),
            nn.ReLU(),
            nn.Linear(hidden_dim, hidden_dim),
            nn.ReLU(),
            nn.Linear(hidden_dim, n_actions),
        )

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        # obs: (..., obs_dim) -> (..., n_actions)
        return self.net(obs)


class MixingNetwork(nn.Module):
    """
    Monotonic mixer: hypernetworks map the global state to the weights of a
    two-layer network over the per-agent Q-values.

    Both weight matrices pass through ``abs``, so ``dQ_tot/dQ_i >= 0`` for every
    state; the final bias comes from a two-layer hypernetwork.
    """

    def __init__(self, n_agents: int, state_dim: int, embed_dim: int = 64, hypernet_hidden_dim: int = 64) -> None:
        super().__init__()
        self.n_agents = n_agents
        self.state_dim = state_dim
        self.embed_dim = embed_dim

        self.hyper_w1 = nn.Linear(state_dim, embed_dim * n_agents)
        self.hyper_b1 = nn.Linear(state_dim, embed_dim)
        self.hyper_w2 = nn.Linear(state_dim, embed_dim)
        self.hyper_b2 = nn.Sequential(
            nn.Linear(state_dim, hypernet_hidden_dim),
            nn.ReLU(),
            nn.Linear(hypernet_hidden_dim, 1),
        )

    def forward(self, q_values: torch.Tensor, states: torch.Tensor) -> torch.Tensor:
        # q_values: (batch, n_agents); states: (batch, state_dim) -> (batch,)
        batch = q_values.size(0)
        q = q_values.view(batch, 1, self.n_agents)

        w1 = torch.abs(self.hyper_w1(states)).view(batch, self.n_agents, self.embed_dim)
        b1 = self.hyper_b1(states).view(batch, 1, self.embed_dim)
        hidden = F.elu(torch.bmm(q, w1) + b1)

        w2 = torch.abs(self.hyper_w2(states)).view(batch, self.embed_dim, 1)
        b2 = self.hyper_b2(states).view(batch, 1, 1)
        return (torch.bmm(hidden, w2) + b2).view(batch)
