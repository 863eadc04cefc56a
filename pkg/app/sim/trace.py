# app/sim/trace.py
"""
Episode traces: the per-step record every controller produces.

File layout (line-oriented, UTF-8)::

    # hab-coverage trace v1
    # config {"n_agents": 3, ...}
    # seed 7
    # controller voronoi
    # truncated 0
    1 0 x y alt action 1 x y alt action ... | reward coverage_ratio separation

Each step line holds the post-step state of every agent together with the action
applied during that step. Floats are written with ``repr`` so a save/load cycle is
lossless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from app.core.errors import TraceParseError
from app.models import Action, EnvConfig

TRACE_MAGIC = "# hab-coverage trace"
TRACE_VERSION = 1
_HEADER_KEYS = ("config", "seed", "controller", "truncated")


@dataclass(frozen=True)
class AgentRecord:
    agent_id: int
    x: float
    y: float
    altitude: float
    action: Action


@dataclass(frozen=True)
class TraceStep:
    t: int
    agents: List[AgentRecord]
    reward: float
    coverage_ratio: float
    separation: float


@dataclass
class EpisodeTrace:
    config: EnvConfig
    seed: int
    controller: str
    steps: List[TraceStep] = field(default_factory=list)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def n_agents(self) -> int:
        return self.config.n_agents

    def positions(self) -> np.ndarray:
        """(steps, agents, 2) array of x/y in km."""
        return np.array([[(a.x, a.y) for a in s.agents] for s in self.steps], dtype=np.float64).reshape(
            len(self.steps), self.n_agents, 2
        )

    def altitudes(self) -> np.ndarray:
        return np.array([[a.altitude for a in s.agents] for s in self.steps], dtype=np.float64).reshape(
            len(self.steps), self.n_agents
        )

    def actions(self) -> np.ndarray:
        return np.array([[int(a.action) for a in s.agents] for s in self.steps], dtype=np.int64).reshape(
            len(self.steps), self.n_agents
        )

    def rewards(self) -> np.ndarray:
        return np.array([s.reward for s in self.steps], dtype=np.float64)

    def coverage_ratios(self) -> np.ndarray:
        return np.array([s.coverage_ratio for s in self.steps], dtype=np.float64)

    @property
    def episode_return(self) -> float:
        return float(np.sum(self.rewards())) if self.steps else 0.0


# ------------------- text format -------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def format_step(step: TraceStep) -> str:
    parts = [str(step.t)]
    for a in step.agents:
        parts += [str(a.agent_id), _fmt(a.x), _fmt(a.y), _fmt(a.altitude), str(int(a.action))]
    parts += ["|", _fmt(step.reward), _fmt(step.coverage_ratio), _fmt(step.separation)]
    return " ".join(parts)


def save_trace(trace: EpisodeTrace, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8") as f:
        f.write(f"{TRACE_MAGIC} v{TRACE_VERSION}\n")
        f.write(f"# config {json.dumps(trace.config.model_dump(mode='json'), sort_keys=True)}\n")
        f.write(f"# seed {trace.seed}\n")
        f.write(f"# controller {trace.controller}\n")
        f.write(f"# truncated {int(trace.truncated)}\n")
        for step in trace.steps:
            f.write(format_step(step) + "\n")
    return p


def _parse_step(line: str, line_no: int, n_agents: int) -> TraceStep:
    head, sep, tail = line.partition("|")
    if not sep:
        raise TraceParseError("missing '|' reward block", line=line_no)
    tokens = head.split()
    if len(tokens) != 1 + 5 * n_agents:
        raise TraceParseError(
            f"expected {1 + 5 * n_agents} fields before '|', found {len(tokens)}", line=line_no
        )
    metrics = tail.split()
    if len(metrics) != 3:
        raise TraceParseError(f"expected 3 fields after '|', found {len(metrics)}", line=line_no)
    try:
        agents = []
        for i in range(n_agents):
            aid, x, y, alt, act = tokens[1 + 5 * i: 6 + 5 * i]
            agents.append(AgentRecord(int(aid), float(x), float(y), float(alt), Action(int(act))))
        return TraceStep(int(tokens[0]), agents, float(metrics[0]), float(metrics[1]), float(metrics[2]))
    except ValueError as e:
        raise TraceParseError(f"bad value: {e}", line=line_no) from None


def load_trace(path: Union[str, Path]) -> EpisodeTrace:
    p = Path(path)
    if not p.exists():
        raise TraceParseError(f"trace file not found: {p}")

    with open(p, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].startswith(TRACE_MAGIC):
        raise TraceParseError("not a hab-coverage trace", line=1)
    version = lines[0][len(TRACE_MAGIC):].strip()
    if version != f"v{TRACE_VERSION}":
        raise TraceParseError(f"unsupported trace version {version!r}, expected v{TRACE_VERSION}", line=1)

    header = {}
    for idx, key in enumerate(_HEADER_KEYS, start=2):
        if idx > len(lines):
            raise TraceParseError(f"truncated header, missing '{key}'", line=idx)
        prefix = f"# {key} "
        if not lines[idx - 1].startswith(prefix):
            raise TraceParseError(f"expected '{key}' header", line=idx)
        header[key] = lines[idx - 1][len(prefix):]

    try:
        config = EnvConfig.model_validate(json.loads(header["config"]))
        seed = int(header["seed"])
        truncated = bool(int(header["truncated"]))
    except (ValueError, TypeError) as e:
        raise TraceParseError(f"bad header: {e}", line=2) from None

    trace = EpisodeTrace(config=config, seed=seed, controller=header["controller"].strip(), truncated=truncated)
    first_body = len(_HEADER_KEYS) + 2
    for line_no, line in enumerate(lines[first_body - 1:], start=first_body):
        if not line.strip():
            continue
        step = _parse_step(line, line_no, config.n_agents)
        if step.t != len(trace.steps) + 1:
            raise TraceParseError(f"expected step {len(trace.steps) + 1}, found {step.t}", line=line_no)
        trace.steps.append(step)

    if not trace.truncated and len(trace.steps) != config.episode_steps:
        raise TraceParseError(
            f"truncated file: {len(trace.steps)} of {config.episode_steps} steps",
            line=len(lines),
        )
    return trace


# ------------------- tabular export -------------------

def trace_to_frame(trace: EpisodeTrace) -> pd.DataFrame:
    """Long format, one row per (step, agent); team columns repeat within a step."""
    rows = []
    for step in trace.steps:
        for a in step.agents:
            rows.append(
                {
                    "t": step.t,
                    "agent_id": a.agent_id,
                    "x": a.x,
                    "y": a.y,
                    "alt": a.altitude,
                    "action": int(a.action),
                    "reward": step.reward,
                    "coverage_ratio": step.coverage_ratio,
                    "separation": step.separation,
                }
            )
    columns = ["t", "agent_id", "x", "y", "alt", "action", "reward", "coverage_ratio", "separation"]
    return pd.DataFrame(rows, columns=columns)


def export_trace_csv(trace: EpisodeTrace, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    trace_to_frame(trace).to_csv(p, index=False, float_format="%.17g")
    return p
