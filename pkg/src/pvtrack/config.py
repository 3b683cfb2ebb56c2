"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Every key below may appear at
most once; unknown keys are an error naming the key.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .dependent import structure_from_name
from .glmb import FilterConfig
from .hypothesis import ClutterModel
from .kinematics import NcvModel
from .simulator import Scenario, default_paths, load_paths


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


@dataclass
class RunConfig:
    # orchestration
    structure: str = "collision"
    seed: int = 0
    runs: int = 1
    out_dir: str = "pvtrack_out"
    tree_generations: int = 0
    tree_per_frame: bool = False
    oracle: bool = False
    oracle_k: int = 10
    oracle_limit: int = 50000
    # tracker
    k: int = 100
    pd: float = 0.99
    ps: float = 0.999
    r_birth: float = 0.5
    birth_pos: float = 0.0
    birth_vel: float = 0.0
    birth_var_pos: float = 100.0
    birth_var_vel: float = 25.0
    clutter_intensity: float = 5e-3
    clutter_low: float = -50.0
    clutter_high: float = 150.0
    gate: float = 20.0
    q: float = 1.0
    dt: float = 1.0
    meas_sigma: float = 1.0
    proposal_cap_factor: int = 50
    sensor_pos: float = -100.0
    shadow_halfwidth: float = 1.0
    # simulated world
    duration: int = 60
    sim_pd: float = 0.99
    sim_meas_sigma: float = 1.0
    sim_clutter_intensity: float = 5e-3
    sim_clutter_low: float = -50.0
    sim_clutter_high: float = 150.0
    follower_appears: int = 4
    follower_gap: float = 1.5
    targets_file: str = ""

    def validate(self) -> None:
        if self.structure not in ("independence", "collision", "occlusion"):
            raise ConfigError("structure", f"unknown structure {self.structure!r}")
        for key in ("runs", "k", "duration", "oracle_k", "oracle_limit", "proposal_cap_factor"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")
        if self.tree_generations < 0:
            raise ConfigError("tree_generations", "must be >= 0")
        try:
            self.filter_config()
            self.scenario(self.seed)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(_guess_key(str(exc)), str(exc)) from None

    def filter_config(self) -> FilterConfig:
        params = {}
        if self.structure == "occlusion":
            params = {"sensor_pos": self.sensor_pos, "shadow_halfwidth": self.shadow_halfwidth}
        return FilterConfig(
            pd=self.pd, ps=self.ps, r_birth=self.r_birth,
            birth_mean=(self.birth_pos, self.birth_vel),
            birth_cov=((self.birth_var_pos, 0.0), (0.0, self.birth_var_vel)),
            clutter=ClutterModel(self.clutter_intensity, self.clutter_low, self.clutter_high),
            gate=self.gate, max_hypotheses=self.k,
            structure=structure_from_name(self.structure, **params),
            ncv=NcvModel(self.q, self.dt, self.meas_sigma),
            proposal_cap_factor=self.proposal_cap_factor,
            history_depth=max(self.tree_generations, 5),
        )

    def scenario(self, seed: int) -> Scenario:
        if self.targets_file:
            paths = load_paths(self.targets_file)
        else:
            paths = default_paths(self.duration, self.dt, self.follower_appears,
                                  self.follower_gap)
        return Scenario(
            duration=self.duration, dt=self.dt, targets=paths,
            pd_true=self.sim_pd, meas_sigma_true=self.sim_meas_sigma,
            clutter_true=ClutterModel(self.sim_clutter_intensity, self.sim_clutter_low,
                                      self.sim_clutter_high),
            seed=seed)


def _guess_key(message: str) -> str:
    for f in dataclasses.fields(RunConfig):
        if message.startswith(f.name):
            return f.name
    return "<model>"


def _convert(key: str, raw: str, typ):
    raw = raw.strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {typ.__name__}") from None


_TYPES = {f.name: {"str": str, "int": int, "float": float, "bool": bool}[f.type]
          for f in dataclasses.fields(RunConfig)}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = dataclasses.replace(base) if base is not None else RunConfig()
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno} is not 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(key, "unknown key")
        if key in seen:
            raise ConfigError(key, "given twice")
        seen.add(key)
        setattr(cfg, key, _convert(key, value, _TYPES[key]))
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config(Path(path).read_text())


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _TYPES:
            raise ConfigError(key, "unknown key")
        setattr(cfg, key, value if not isinstance(value, str) else _convert(key, value, _TYPES[key]))
    return cfg


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in dataclasses.fields(cfg))
