"""Run configuration for the command-line front end.

A configuration is a mapping with a ``params`` block (omega or
omega_ratio, omega0, gamma or f, j; f defaults to 0 and j to 10), an output
directory, a seed and one optional block per command. Unknown keys are
rejected and missing ones take defaults, so the canonical form of a
loaded config is complete and round-trips exactly.
"""
from __future__ import annotations

import copy
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigInvalid, DickeError
from .model import ModelParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMMANDS = ("validity-map", "peres", "bands", "semiclassical", "classical", "spectrum")

DEFAULTS = {
    "validity-map": {"f_range": [0.0, 4.0], "omega_ratio_range": [0.0, 12.0], "grid": [80, 80],
                     "ratios": [2.0, 5.0, 10.0], "tol": 0.05},
    "peres": {"observables": ["jz"], "e_range": [-3.0, 1.0], "overlay_points": 20, "n_budget": 4096},
    "bands": {"f_scan": [0.0, 1.5], "steps": 16, "levels": 20, "method": "auto", "n_budget": 4096},
    "semiclassical": {"kind": "pseudospin", "bands": [], "points": 50, "e_range": [-3.0, 1.0]},
    "classical": {"energy": -1.4, "grid": [20, 20], "T": 300.0, "dt": 0.05, "threshold": 0.05,
                  "section_trajectories": 8, "section_T": 200.0,
                  "m_range": [-1.0, -0.5], "m_steps": 11, "freq_T": 1638.4, "kick": 1e-3},
    "spectrum": {"n_max": 0, "count": 0, "e_range": [-3.0, 1.0], "n_budget": 4096},
}
CHOICES = {
    ("peres", "observables"): {"jz", "photons", "jzprime", "shifted"},
    ("bands", "method"): {"auto", "bs", "lmg"},
    ("semiclassical", "kind"): {"pseudospin", "boson"},
}
DEFAULT_J = 10.0
PARAM_KEYS = {"omega", "omega0", "gamma", "f", "omega_ratio", "j"}
TOP_KEYS = {"command", "params", "out", "seed"} | set(DEFAULTS)


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigInvalid(f"{where} must be a finite number, got {value!r}")
    return float(value)


def _canonical_params(block) -> dict:
    if not isinstance(block, dict):
        raise ConfigInvalid("params must be a table")
    unknown = set(block) - PARAM_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown params keys: {sorted(unknown)}")
    omega0 = _number(block.get("omega0", 1.0), "params.omega0")
    if "omega" in block and "omega_ratio" in block:
        raise ConfigInvalid("give omega or omega_ratio, not both")
    if "omega_ratio" in block:
        omega = _number(block["omega_ratio"], "params.omega_ratio") * omega0
    else:
        omega = _number(block.get("omega", 1.0), "params.omega")
    if "gamma" in block and "f" in block:
        raise ConfigInvalid("give gamma or f, not both")
    out = {"omega": omega, "omega0": omega0, "j": _number(block.get("j", DEFAULT_J), "params.j")}
    if "gamma" not in block:
        out["f"] = _number(block.get("f", 0.0), "params.f")
    else:
        out["gamma"] = _number(block["gamma"], "params.gamma")
    try:
        _build(out)
    except DickeError as exc:
        raise ConfigInvalid(f"invalid params: {exc}") from exc
    return out


def _build(p) -> ModelParams:
    if "f" in p:
        return ModelParams.from_f(p["omega"], p["omega0"], p["f"], p["j"])
    return ModelParams(p["omega"], p["omega0"], p["gamma"], p["j"])


def _canonical_block(name, block) -> dict:
    if not isinstance(block, dict):
        raise ConfigInvalid(f"{name} must be a table")
    defaults = DEFAULTS[name]
    unknown = set(block) - set(defaults)
    if unknown:
        raise ConfigInvalid(f"unknown {name} keys: {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    for key, value in block.items():
        ref = defaults[key]
        if isinstance(ref, list):
            if not isinstance(value, (list, tuple)):
                raise ConfigInvalid(f"{name}.{key} must be a list")
            if ref and isinstance(ref[0], str):
                value = [str(v) for v in value]
            elif key in ("grid",):
                value = [int(_number(v, f"{name}.{key}")) for v in value]
            else:
                value = [_number(v, f"{name}.{key}") for v in value]
            if len(ref) == 2 and len(value) != 2:
                raise ConfigInvalid(f"{name}.{key} needs two entries")
        elif isinstance(ref, str):
            value = str(value)
        elif isinstance(ref, int):
            value = int(_number(value, f"{name}.{key}"))
        else:
            value = _number(value, f"{name}.{key}")
        allowed = CHOICES.get((name, key))
        if allowed is not None:
            bad = sorted(set(value if isinstance(value, list) else [value]) - allowed)
            if bad:
                raise ConfigInvalid(f"{name}.{key}: unsupported {bad}, expected one of {sorted(allowed)}")
        out[key] = value
    return out


@dataclass
class RunConfig:
    params: dict
    command: str = "spectrum"
    out: str = "out"
    seed: int = 0
    blocks: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigInvalid("configuration must be a table")
        unknown = set(data) - TOP_KEYS
        if unknown:
            raise ConfigInvalid(f"unknown configuration keys: {sorted(unknown)}")
        command = str(data.get("command", "spectrum"))
        if command not in COMMANDS:
            raise ConfigInvalid(f"unknown command {command!r}")
        seed = data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigInvalid("seed must be an integer")
        blocks = {name: _canonical_block(name, data.get(name, {})) for name in DEFAULTS}
        return cls(_canonical_params(data.get("params", {})), command, str(data.get("out", "out")), seed, blocks)

    def to_mapping(self) -> dict:
        out = {"command": self.command, "out": self.out, "seed": self.seed, "params": dict(self.params)}
        out.update(copy.deepcopy(self.blocks))
        return out

    def canonical(self) -> str:
        return json.dumps(self.to_mapping(), sort_keys=True, indent=2)

    def model(self) -> ModelParams:
        return _build(self.params)

    def block(self, name: str) -> dict:
        return self.blocks[name]


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigInvalid(f"cannot parse {path}: {exc}") from exc
    return RunConfig.from_mapping(data)
