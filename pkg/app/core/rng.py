# app/core/rng.py
"""
Seeded random streams.

Every stochastic element draws from its own named substream derived from a master
seed with counter-based splitting (numpy ``SeedSequence`` spawn keys feeding a
``Philox`` bit generator). Adding an agent, or drawing more from one stream, never
changes the numbers another stream produces.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Any, Dict

import numpy as np


class Purpose(IntEnum):
    INIT = 0
    DYNAMICS = 1
    FORECAST = 2
    WIND = 3
    POLICY = 4
    TRAIN_EPISODE = 5
    EVAL_EPISODE = 6
    SAMPLER = 7
    TORCH = 8


def stream(master_seed: int, purpose: Purpose, *keys: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(purpose), *map(int, keys)))
    return np.random.Generator(np.random.Philox(seq))


def agent_stream(episode_seed: int, agent_id: int, purpose: Purpose) -> np.random.Generator:
    return stream(episode_seed, purpose, agent_id)


def derive_seed(master_seed: int, purpose: Purpose, *keys: int) -> int:
    """A 32-bit integer seed for consumers that take plain ints (torch, wind models)."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(purpose), *map(int, keys)))
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def generator_state(rng: np.random.Generator) -> Dict[str, Any]:
    return rng.bit_generator.state


def restore_generator(state: Dict[str, Any]) -> np.random.Generator:
    bit_gen = getattr(np.random, state["bit_generator"])()
    bit_gen.state = state
    return np.random.Generator(bit_gen)
