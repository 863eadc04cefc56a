# app/core/config_loader.py
"""
Experiment configuration files.

Priority:
  1. explicit path (``--config``)
  2. ``HABCOV_CONFIG`` from the environment / ``.env``
  3. built-in defaults

The file is INI-style ``key = value`` with sections ``[env]``, ``[wind]``,
``[train]``, ``[baseline]`` and ``[run]``. CLI flags are applied on top as
overrides. Unknown sections or keys are rejected with the offending
``section.key``.
"""

from __future__ import annotations

import configparser
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Type, Union

from pydantic import BaseModel, ValidationError

from app.core.errors import ConfigError
from app.core.logging import get_logger
from app.models import BaselineConfig, EnvConfig, LayerSpec, RunConfig, RunSection, TrainConfig, WindSpec
from app.settings import get_settings

log = get_logger("hab-coverage.config")

SECTIONS: Dict[str, Type[BaseModel]] = {
    "env": EnvConfig,
    "wind": WindSpec,
    "train": TrainConfig,
    "baseline": BaselineConfig,
    "run": RunSection,
}
# [wind] is written as its own section but lives under env.wind
_NESTED = {"env": {"wind"}}

_LAYER_FIELDS = (
    "center_altitude_m",
    "bearing_deg",
    "speed_mps",
    "vertical_extent_m",
    "bearing_rate_deg_per_min",
    "speed_rate_mps_per_min",
)

Overrides = Mapping[Tuple[str, str], Any]


def section_keys(section: str) -> List[str]:
    model = SECTIONS[section]
    return [k for k in model.model_fields if k not in _NESTED.get(section, set())]


# ------------------- layers -------------------

def parse_layers(raw: str) -> List[Dict[str, float]]:
    """``center:bearing:speed:extent[:bearing_rate:speed_rate]`` entries, comma separated."""
    layers = []
    for n, chunk in enumerate(c.strip() for c in raw.split(",")):
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) not in (4, 6):
            raise ConfigError(
                f"wind.layers entry {n + 1} ({chunk!r}) needs 4 or 6 ':'-separated values",
                key="wind.layers",
            )
        try:
            layers.append(dict(zip(_LAYER_FIELDS, (float(p) for p in parts))))
        except ValueError:
            raise ConfigError(f"wind.layers entry {n + 1} ({chunk!r}) is not numeric", key="wind.layers") from None
    return layers


def format_layers(layers: Iterable[LayerSpec]) -> str:
    return ", ".join(
        ":".join(repr(float(getattr(layer, f))) for f in _LAYER_FIELDS) for layer in layers
    )


# ------------------- reading -------------------

def resolve_config_path(path: Optional[Union[str, Path]] = None) -> Optional[Path]:
    if path:
        return Path(path)
    env_path = get_settings().HABCOV_CONFIG
    if env_path:
        return Path(env_path)
    return None


def read_config_file(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive field names
    try:
        with open(p, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {p}: {e}") from None

    if parser.defaults():
        key = next(iter(parser.defaults()))
        raise ConfigError(f"key '{key}' must be inside a section", key=key)

    raw: Dict[str, Dict[str, str]] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown config section [{section}]", key=section)
        allowed = set(section_keys(section))
        for key, value in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown config key '{section}.{key}'", key=f"{section}.{key}")
            raw.setdefault(section, {})[key] = value.strip()
    return raw


def _error_key(err: Dict[str, Any]) -> str:
    loc = [str(p) for p in err.get("loc", ())]
    if loc[:2] == ["env", "wind"]:
        loc = ["wind"] + loc[2:]
    return ".".join(loc[:2]) if len(loc) >= 2 else ".".join(loc)


def build_run_config(raw: Mapping[str, Mapping[str, Any]], overrides: Optional[Overrides] = None) -> RunConfig:
    sections: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}
    for name, values in raw.items():
        for key, value in values.items():
            # an empty value means "use the default"
            if value == "":
                continue
            sections[name][key] = value

    for (section, key), value in (overrides or {}).items():
        if section not in SECTIONS or key not in section_keys(section):
            raise ConfigError(f"unknown config key '{section}.{key}'", key=f"{section}.{key}")
        if value is not None:
            sections[section][key] = value

    if isinstance(sections["wind"].get("layers"), str):
        sections["wind"]["layers"] = parse_layers(sections["wind"]["layers"])

    payload = {
        "env": {**sections["env"], "wind": sections["wind"]},
        "train": sections["train"],
        "baseline": sections["baseline"],
        "run": sections["run"],
    }
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        key = _error_key(first)
        raise ConfigError(f"invalid value for '{key}': {first.get('msg')}", key=key) from None


def load_run_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Overrides] = None) -> RunConfig:
    resolved = resolve_config_path(path)
    raw = read_config_file(resolved) if resolved is not None else {}
    if resolved is not None:
        log.info("Loaded config from %s", resolved)
    return build_run_config(raw, overrides)


# ------------------- writing -------------------

def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    sections = {
        "env": cfg.env,
        "wind": cfg.env.wind,
        "train": cfg.train,
        "baseline": cfg.baseline,
        "run": cfg.run,
    }
    lines = ["# hab-coverage experiment configuration"]
    for name, model in sections.items():
        lines.append("")
        lines.append(f"[{name}]")
        dumped = model.model_dump(mode="json")
        for key in section_keys(name):
            if name == "wind" and key == "layers":
                text = format_layers(model.layers)
            else:
                text = _format_value(dumped[key])
            lines.append(f"{key} = {text}".rstrip())
    return "\n".join(lines) + "\n"


def write_resolved_config(cfg: RunConfig, out_dir: Union[str, Path]) -> Path:
    p = Path(out_dir) / "resolved_config.ini"
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dump_config(cfg), encoding="utf-8")
    return p


# ------------------- seed manifests -------------------

def read_seeds_file(path: Union[str, Path]) -> List[int]:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"seeds file not found: {p}", key="run.seeds")
    seeds: List[int] = []
    for line_no, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        for token in line.split("#", 1)[0].replace(",", " ").split():
            try:
                seeds.append(int(token))
            except ValueError:
                raise ConfigError(f"{p}:{line_no}: seed {token!r} is not an integer", key="run.seeds") from None
    if not seeds:
        raise ConfigError(f"seeds file {p} lists no seeds", key="run.seeds")
    return seeds


def write_seeds_file(seeds: Iterable[int], out_dir: Union[str, Path]) -> Path:
    p = Path(out_dir) / "seeds.txt"
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text("".join(f"{int(s)}\n" for s in seeds), encoding="utf-8")
    return p
