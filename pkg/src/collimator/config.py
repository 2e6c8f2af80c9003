"""Engine configuration: JSON file in, fully-defaulted dataclasses out."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .acw import EcwConfig, default_acw_configs
from .operator_sim import OperatorParams
from .session import ArchParams

ENV_CONFIG = "COLLIMATOR_CONFIG"


@dataclass(frozen=True)
class AmplificationParams:
    pos_gain: float = 50.0
    pos_acce: float = 2.0
    pos_mdt: float = 50.0
    ang_gain: float = 0.1
    ang_acce: float = 2.0
    ang_mdt: float = 45.0

    def configs(self) -> tuple[EcwConfig, ...]:
        return default_acw_configs(self.pos_gain, self.pos_acce, self.pos_mdt,
                                   self.ang_gain, self.ang_acce, self.ang_mdt)


@dataclass(frozen=True)
class GswParams:
    pos_threshold: float = 2.0
    ang_threshold: float = 2.0
    cylinder_length_mm: float = 20.0
    cylinder_radius_mm: float = 1.0


@dataclass(frozen=True)
class EngineConfig:
    amplification: AmplificationParams = AmplificationParams()
    gsw: GswParams = GswParams()
    display_scale: float = 0.1
    widget_up_offset_mm: float = 40.0
    arch: ArchParams = ArchParams()
    operator: OperatorParams = OperatorParams()
    training_seed: int = 12345
    training_radius_mm: float = 300.0
    training_count: int = 32


def _from_dict(cls, data: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**data)


_NESTED = {
    "amplification": AmplificationParams,
    "gsw": GswParams,
    "arch": ArchParams,
    "operator": OperatorParams,
}


def config_from_dict(data: dict) -> EngineConfig:
    kwargs = {}
    valid = {f.name for f in dataclasses.fields(EngineConfig)}
    unknown = set(data) - valid
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, value in data.items():
        if key in _NESTED:
            value = _from_dict(_NESTED[key], value)
        kwargs[key] = value
    return EngineConfig(**kwargs)


def config_to_dict(cfg: EngineConfig) -> dict:
    return dataclasses.asdict(cfg)


def load_config(path: str | None = None) -> EngineConfig:
    """Read a JSON config; falls back to $COLLIMATOR_CONFIG, then defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        return EngineConfig()
    with open(path, encoding="utf-8") as f:
        return config_from_dict(json.load(f))


def save_config(cfg: EngineConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config_to_dict(cfg), f, indent=2)
        f.write("\n")
