"""Experiment configuration files.

Flat INI text, for example::

    [experiment]
    name = mu
    d = 2
    master_seed = 7
    samples = 200

    [distribution]
    kind = exponential
    rate = 1

    [grid]
    n = 8,16,32

    [params]
    direction = 1,0
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..weights import Distribution

EXPERIMENTS = (
    "tau-sample",
    "mu",
    "fluctuation",
    "lower-tail",
    "shape",
    "entropy-exact",
    "pivotal-stats",
    "kesten",
    "box-sandwich",
    "z-moments",
)

# grids and params each experiment cannot run without
REQUIRED = {
    "tau-sample": (("grid", "n"), ("params", "direction")),
    "mu": (("grid", "n"), ("params", "direction")),
    "fluctuation": (("grid", "n"), ("params", "direction")),
    "lower-tail": (("params", "direction"),),
    "shape": (("grid", "t"), ("params", "fan")),
    "entropy-exact": (("params", "system"),),
    "pivotal-stats": (("params", "direction"), ("params", "c"), ("params", "alpha")),
    "kesten": (("grid", "m"), ("params", "a")),
    "box-sandwich": (("grid", "m"), ("params", "c7")),
    "z-moments": (),
}

GRID_KEYS = ("n", "t", "m", "lambda")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    d: int
    dist: Distribution
    master_seed: int = 0
    samples: int = 100
    max_radius: int = 2048
    workers: int = 1
    output: str = ""
    force: bool = False
    grids: dict[str, tuple[float, ...]] = field(default_factory=dict)
    params: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.d < 2:
            raise ConfigError("d must be at least 2")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        for key in self.grids:
            if key not in GRID_KEYS:
                raise ConfigError(f"unknown grid {key!r}")
        for section, key in REQUIRED[self.name]:
            have = self.grids if section == "grid" else self.params
            if key not in have:
                raise ConfigError(f"experiment {self.name} needs [{section}] {key}")

    # typed accessors -----------------------------------------------------

    def grid(self, key: str, cast=float) -> tuple:
        return tuple(cast(v) for v in self.grids.get(key, ()))

    def param(self, key: str, default=None, cast=str):
        if key not in self.params:
            if default is None:
                raise ConfigError(f"missing parameter {key!r}")
            return default
        return cast(self.params[key])

    def direction(self) -> tuple[int, ...]:
        v = tuple(int(c) for c in self.param("direction", ",".join(["1"] + ["0"] * (self.d - 1))).split(","))
        if len(v) != self.d:
            raise ConfigError(f"direction {v} does not have dimension {self.d}")
        return v

    # text form -----------------------------------------------------------

    def to_parser(self) -> configparser.ConfigParser:
        cp = configparser.ConfigParser(interpolation=None)
        cp["experiment"] = {
            "name": self.name,
            "d": str(self.d),
            "master_seed": str(self.master_seed),
            "samples": str(self.samples),
            "max_radius": str(self.max_radius),
            "workers": str(self.workers),
            "output": self.output,
            "force": "true" if self.force else "false",
        }
        cp["distribution"] = self.dist.to_dict()
        cp["grid"] = {k: ",".join(_fmt(v) for v in self.grids[k]) for k in sorted(self.grids)}
        cp["params"] = {k: self.params[k] for k in sorted(self.params)}
        return cp

    def dumps(self) -> str:
        buf = io.StringIO()
        self.to_parser().write(buf)
        return buf.getvalue()

    def hash(self) -> str:
        """Digest of everything that can change results (workers and output excluded)."""
        canon = replace(self, workers=1, output="")
        return hashlib.sha256(canon.dumps().encode("utf-8")).hexdigest()[:16]


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def loads(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    ex = cp["experiment"]
    try:
        dist = Distribution.from_dict(dict(cp["distribution"])) if "distribution" in cp else Distribution.constant(1.0)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad [distribution]: {exc}") from exc
    grids = {}
    if "grid" in cp:
        for k, v in cp["grid"].items():
            try:
                grids[k] = tuple(float(x) for x in v.split(",") if x.strip())
            except ValueError as exc:
                raise ConfigError(f"grid {k}: {exc}") from exc
    params = dict(cp["params"]) if "params" in cp else {}
    try:
        return ExperimentConfig(
            name=ex.get("name", ""),
            d=int(ex.get("d", "2")),
            dist=dist,
            master_seed=int(ex.get("master_seed", "0")),
            samples=int(ex.get("samples", "100")),
            max_radius=int(ex.get("max_radius", "2048")),
            workers=int(ex.get("workers", "1")),
            output=ex.get("output", ""),
            force=_bool(ex.get("force", "false")),
            grids=grids,
            params=params,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load(path) -> ExperimentConfig:
    return loads(Path(path).read_text(encoding="utf-8"))
