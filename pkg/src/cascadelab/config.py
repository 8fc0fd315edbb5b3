"""Run configuration: TOML files with dotted sections (``model.q0 = 0.6``)."""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .beliefs import History, PeriodRecord, check_mode, read_history_csv
from .core import ModeError, ModelError, ModelParams
from .costs import cost_model_from_dict
from .dynamics import SimConfig
from .welfare import subsidy_rule_from_dict

EXPERIMENTS = ("simulate", "value", "benchmarks", "breaktime", "welfare", "subsidy", "sweep", "earlytable")


class ConfigError(ValueError):
    """Bad configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# every accepted key with its default; None means "unset"
DEFAULTS: dict[str, dict[str, Any]] = {
    "": {"experiment": "simulate", "seed": 0},
    "model": {f: getattr(ModelParams(), f) for f in ModelParams.__dataclass_fields__},
    "cost": {"family": "uniform", "fbar": None, "rate": None, "loc": None, "scale": None},
    "sim": {
        "horizon": 50,
        "n_reps": 10,
        "mode": "perfect",
        "theta": None,
        "education_enabled": True,
        "history": None,
        "history_file": None,
    },
    "subsidy": {"kind": "none", "s": None, "eta": None, "pi_bar": None, "p_star": None},
    "value": {"L_U": 0.0, "L_E": 0.0},
    "breaktime": {"delta": 0.2, "p_star": 0.9, "strict": False},
    "benchmarks": {"theta": 1, "q": 0.7, "qhat": 0.8, "mu0": None, "horizon": 200},
    "sweep": {"target": "kappa0", "grid": None, "start": None, "stop": None, "num": None, "hold_educated_llr": True},
    "output": {"path": None, "format": "csv"},
}


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}.{k}" if prefix else k
        if isinstance(v, dict):
            out.update(_flatten(v, key))
        else:
            out[key] = v
    return out


def _split(key: str) -> tuple[str, str]:
    if "." in key:
        sec, name = key.split(".", 1)
        return sec, name
    return "", key


def file_keys(path) -> set:
    """Flat keys set explicitly in a config file."""
    with open(path, "rb") as fh:
        return set(_flatten(tomllib.load(fh)))


def parse_value(text: str) -> Any:
    """Parse a ``--set`` value with TOML literal rules, falling back to a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)  # flat "section.key" -> value
    source: Optional[str] = None

    @classmethod
    def from_mapping(cls, mapping: dict, source: Optional[str] = None) -> "RunConfig":
        flat = {f"{s}.{k}" if s else k: v for s, sec in DEFAULTS.items() for k, v in sec.items()}
        for key, v in _flatten(mapping).items():
            sec, name = _split(key)
            if sec not in DEFAULTS or name not in DEFAULTS[sec]:
                raise ConfigError(key, "unknown configuration key")
            flat[key] = v
        rc = cls(flat, source)
        rc.validate()
        return rc

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        p = Path(path)
        try:
            with open(p, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {p}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"cannot parse {p}: {exc}") from None
        return cls.from_mapping(data, str(p))

    def with_overrides(self, overrides: dict) -> "RunConfig":
        nested: dict = {}
        for key, v in self.values.items():
            sec, name = _split(key)
            if v is not None:
                (nested.setdefault(sec, {}) if sec else nested)[name] = v
        for key, v in overrides.items():
            sec, name = _split(key)
            if sec not in DEFAULTS or name not in DEFAULTS[sec]:
                raise ConfigError(key, "unknown configuration key")
            (nested.setdefault(sec, {}) if sec else nested)[name] = v
        return RunConfig.from_mapping(nested, self.source)

    def get(self, key: str) -> Any:
        return self.values[key]

    def section(self, sec: str) -> dict:
        return {k.split(".", 1)[1]: v for k, v in self.values.items() if k.startswith(sec + ".") and v is not None}

    @property
    def experiment(self) -> str:
        return self.values["experiment"]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    # ---- typed views

    def model_params(self) -> ModelParams:
        sec = self.section("model")
        vals = {}
        for k, v in sec.items():
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"model.{k}", f"must be a number, got {v!r}")
            vals[k] = float(v)
        try:
            return ModelParams(**vals)
        except ModelError as exc:
            name = str(exc).split("=", 1)[0]
            raise ConfigError(f"model.{name}", str(exc)) from None

    def cost_model(self):
        try:
            return cost_model_from_dict(self.section("cost"))
        except ModelError as exc:
            raise ConfigError("cost", str(exc)) from None

    def subsidy_rule(self):
        sec = self.section("subsidy")
        if sec.get("kind", "none") == "none":
            return None
        try:
            return subsidy_rule_from_dict(sec)
        except ModelError as exc:
            raise ConfigError("subsidy", str(exc)) from None

    def history(self) -> History:
        mode = check_mode(self.values["sim.mode"])
        inline, path = self.values["sim.history"], self.values["sim.history_file"]
        if inline is not None and path is not None:
            raise ConfigError("sim.history", "give either sim.history or sim.history_file, not both")
        try:
            if path is not None:
                h = read_history_csv(path, mode)
                if h.mode != mode:
                    raise ModeError(f"history file is {h.mode} but sim.mode is {mode}")
                return h
            if inline is None:
                return History((), mode)
            return History(tuple(PeriodRecord(*[int(x) for x in row]) for row in inline), mode)
        except FileNotFoundError:
            raise ConfigError("sim.history_file", f"file not found: {path}") from None
        except (ModelError, ModeError, TypeError) as exc:
            raise ConfigError("sim.history" if path is None else "sim.history_file", str(exc)) from None

    def sim_config(self, n_reps: Optional[int] = None) -> SimConfig:
        theta = self.values["sim.theta"]
        try:
            return SimConfig(
                params=self.model_params(),
                cost_model=self.cost_model(),
                horizon=int(self.values["sim.horizon"]),
                n_reps=int(n_reps if n_reps is not None else self.values["sim.n_reps"]),
                mode=self.values["sim.mode"],
                initial_history=self.history(),
                subsidy_rule=self.subsidy_rule(),
                seed=int(self.seed),
                theta=None if theta is None else int(theta),
                education_enabled=bool(self.values["sim.education_enabled"]),
            )
        except ConfigError:
            raise
        except (ModelError, ModeError) as exc:
            raise ConfigError("sim", str(exc)) from None

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed", f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        fmt = self.values["output.format"]
        if fmt not in ("csv", "json"):
            raise ConfigError("output.format", f"format must be csv or json, got {fmt!r}")
        for key in ("sim.horizon", "sim.n_reps", "benchmarks.horizon"):
            v = self.values[key]
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(key, f"must be a positive integer, got {v!r}")
        try:
            check_mode(self.values["sim.mode"])
        except ModeError as exc:
            raise ConfigError("sim.mode", str(exc)) from None
        # typed views raise ConfigError naming the key
        self.model_params()
        self.cost_model()
        self.subsidy_rule()

    def resolved(self) -> dict:
        """Nested dict of every set value, suitable for re-running."""
        out: dict = {}
        for key, v in sorted(self.values.items()):
            if v is None:
                continue
            sec, name = _split(key)
            (out.setdefault(sec, {}) if sec else out)[name] = copy.deepcopy(v)
        return out


# Built-in break-time scenario, used when ``breaktime`` runs without a forced
# prefix. Three uneducated 1's against theta = 0 put the uneducated regime in
# a 1-cascade while educated beliefs still point to 0.
BREAKTIME_PRESET: dict[str, Any] = {
    "model.mu0": 1.0 / (1.0 + math.exp(2.8)),
    "model.q0": 0.6,
    "model.q1": 0.9,
    "model.qhat0": 0.97,
    "model.qhat1": 0.99,
    "cost.family": "uniform",
    "cost.fbar": 1.0,
    "sim.theta": 0,
    "sim.horizon": 200,
    "sim.history": [[1, 0], [1, 0], [1, 0]],
}
