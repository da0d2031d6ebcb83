"""Run configuration file (YAML).

Sections: ``optimizer``, ``scenario``, ``world``, ``policy``, ``train`` and
``output``. Every key is optional; unknown keys are rejected with the dotted
path of the key in the error. Values are coerced to the field's declared
type, so a parsed config serializes back to the same document.
"""

from __future__ import annotations

import dataclasses
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from ..errors import ConfigError
from ..harness import TrainConfig
from ..search.optimizer import OptimizerConfig
from ..sim.config import WorldConfig


@dataclass(frozen=True)
class ScenarioSection:
    name: str = "base_attack"
    scale: float = 0.1


@dataclass(frozen=True)
class PolicySection:
    # None picks the default for the scale (full width at scale 1)
    shape: Optional[tuple] = None
    init_gain: float = 1.0


@dataclass(frozen=True)
class TrainSection:
    iterations: int = 10
    episodes_per_sample: int = 1
    eval_every: int = 0
    eval_episodes: int = 5
    checkpoint_every: int = 0
    seed: int = 0
    parallelism: int = 1
    chunk_size: int = 16
    common_random_numbers: bool = False
    shared_init: bool = False
    shared_noise: bool = False


@dataclass(frozen=True)
class OutputSection:
    dir: str = "runs/default"
    metrics: str = "metrics.jsonl"
    checkpoint: str = "checkpoint.sgss"


@dataclass(frozen=True)
class RunConfig:
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    world: WorldConfig = field(default_factory=WorldConfig)
    policy: PolicySection = field(default_factory=PolicySection)
    train: TrainSection = field(default_factory=TrainSection)
    output: OutputSection = field(default_factory=OutputSection)

    def train_config(self) -> TrainConfig:
        t = self.train
        return TrainConfig(
            optimizer=self.optimizer, scenario=self.scenario.name, scale=self.scenario.scale,
            iterations=t.iterations, episodes_per_sample=t.episodes_per_sample,
            eval_every=t.eval_every, eval_episodes=t.eval_episodes,
            checkpoint_every=t.checkpoint_every, seed=t.seed, parallelism=t.parallelism,
            chunk_size=t.chunk_size, policy_shape=self.policy.shape, world=self.world,
            init_gain=self.policy.init_gain, common_random_numbers=t.common_random_numbers,
            shared_init=t.shared_init, shared_noise=t.shared_noise,
        )


def _coerce(value, hint, key):
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is typing.Union:
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(value, inner[0], key)
    if dataclasses.is_dataclass(hint):
        if not isinstance(value, dict):
            raise ConfigError(f"{key} must be a mapping", key)
        return _build(hint, value, key + ".")
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false, got {value!r}", key)
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}", key)
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}", key)
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}", key)
        return value
    if hint is tuple or origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a list, got {value!r}", key)
        return tuple(value)
    return value


def _build(cls, data: dict, prefix: str = ""):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for k, v in data.items():
        key = prefix + str(k)
        if k not in names:
            raise ConfigError(f"unknown config key {key!r}", key)
        kwargs[k] = _coerce(v, hints[k], key)
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        path = prefix + exc.key if exc.key else prefix.rstrip(".")
        raise ConfigError(f"{path}: {exc}", path) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{prefix.rstrip('.') or 'config'}: {exc}", prefix.rstrip(".")) from None


def parse_config(data: Optional[dict]) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    return _build(RunConfig, data)


def apply_override(data: dict, assignment: str) -> dict:
    """Apply one ``a.b.c=value`` override to a raw config mapping (YAML-typed value)."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not key=value")
    path, raw = assignment.split("=", 1)
    parts = path.strip().split(".")
    node = data
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{path}: {p} is not a section", path)
    node[parts[-1]] = yaml.safe_load(raw)
    return data


def load_config(path=None, overrides=()) -> RunConfig:
    data = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            data = yaml.safe_load(p.read_text()) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{p}: not valid YAML ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config document must be a mapping")
    for o in overrides:
        apply_override(data, o)
    return parse_config(data)


def to_dict(cfg) -> dict:
    out = {}
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if dataclasses.is_dataclass(v):
            v = to_dict(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)
