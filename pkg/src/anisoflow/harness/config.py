"""Run configuration: YAML files, validation with field paths, overrides."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml

from ..anisotropy import from_config as sigma_from_config
from ..curves import CurveSpec
from ..errors import ConfigError

OUTPUT_FORMATS = ("csv", "svg", "snapshots")
_TOP_KEYS = {
    "name", "curve", "sigma", "T", "omega", "lambda", "cfl", "max_tau",
    "snapshot_dt", "snapshot_every", "output_dir", "outputs", "reference",
    "crossing", "seed", "c_min", "R_min",
}


@dataclass
class FlowConfig:
    curve: CurveSpec
    sigma: dict
    T: float
    name: str = "run"
    omega: float = 1000.0
    lam: float = 1.0
    cfl: Optional[float] = 0.25
    max_tau: Optional[float] = None
    snapshot_dt: Optional[float] = None  # default T/100
    snapshot_every: Optional[int] = None
    output_dir: Optional[str] = None
    outputs: tuple = OUTPUT_FORMATS
    reference: bool = False  # draw the Wulff boundary of sigma in SVGs
    crossing: bool = False  # run crossing detection against the reference
    seed: int = 0
    c_min: Optional[float] = None
    R_min: Optional[float] = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def N(self):
        return self.curve.N

    @property
    def cadence(self):
        return self.snapshot_dt if self.snapshot_dt is not None else self.T / 100.0

    def build_sigma(self):
        return sigma_from_config(self.sigma, "sigma")


def _number(d, key, path, default=None, positive=False, allow_none=False, integer=False):
    if key not in d:
        return default
    v = d[key]
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}" if path else key, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(key, f"must be positive, got {v!r}")
    return int(v) if integer else float(v)


def from_mapping(data):
    """Validate a parsed mapping and build a FlowConfig."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "configuration must be a mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    for key in ("curve", "sigma", "T"):
        if key not in data:
            raise ConfigError(key, "missing required field")

    curve = CurveSpec.from_config(data["curve"], "curve")
    for key in ("sigma",):
        if curve.kind in ("wulff", "counterexample") and key not in curve.params:
            raise ConfigError(f"curve.{key}", "missing required field")
    sigma = data["sigma"]
    sigma_from_config(sigma, "sigma")  # validates early, with paths
    if curve.kind in ("wulff", "counterexample"):
        sigma_from_config(curve.params["sigma"], "curve.sigma")

    T = _number(data, "T", "", positive=True)
    cfg = FlowConfig(
        curve=curve,
        sigma=sigma,
        T=T,
        name=str(data.get("name", "run")),
        omega=_number(data, "omega", "", 1000.0),
        lam=_number(data, "lambda", "", 1.0, positive=True),
        cfl=_number(data, "cfl", "", 0.25, positive=True, allow_none=True),
        max_tau=_number(data, "max_tau", "", None, positive=True, allow_none=True),
        snapshot_dt=_number(data, "snapshot_dt", "", None, positive=True, allow_none=True),
        snapshot_every=_number(data, "snapshot_every", "", None, positive=True,
                               allow_none=True, integer=True),
        output_dir=data.get("output_dir"),
        reference=bool(data.get("reference", False)),
        crossing=bool(data.get("crossing", False)),
        seed=int(data.get("seed", 0)),
        c_min=_number(data, "c_min", "", None, positive=True, allow_none=True),
        R_min=_number(data, "R_min", "", None, positive=True, allow_none=True),
        raw=copy.deepcopy(data),
    )
    if cfg.omega < 0:
        raise ConfigError("omega", f"must be non-negative, got {cfg.omega}")
    outputs = data.get("outputs", list(OUTPUT_FORMATS))
    if not isinstance(outputs, (list, tuple)):
        raise ConfigError("outputs", "expected a list")
    for i, fmt in enumerate(outputs):
        if fmt not in OUTPUT_FORMATS:
            raise ConfigError(f"outputs[{i}]", f"unknown format {fmt!r}")
    cfg.outputs = tuple(outputs)
    if cfg.crossing and curve.kind != "counterexample":
        raise ConfigError("crossing", "crossing detection needs a counterexample curve")
    return cfg


def apply_overrides(data, overrides):
    """Return a copy of ``data`` with ``key.sub=value`` overrides applied.

    Values are parsed as YAML scalars, so ``T=0.5`` gives a float and
    ``outputs=[csv]`` a list.
    """
    data = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for p in parts[:-1]:
            nxt = node.get(p)
            if nxt is None:
                nxt = node[p] = {}
            if not isinstance(nxt, dict):
                raise ConfigError(key, f"{p!r} is not a mapping")
            node = nxt
        node[parts[-1]] = yaml.safe_load(text)
    return data


def load_mapping(path):
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"invalid YAML: {exc}") from None
    return data


def load(path, overrides=None):
    return from_mapping(apply_overrides(load_mapping(path), overrides))


def preset_names():
    root = resources.files("anisoflow") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_mapping(name):
    root = resources.files("anisoflow") / "presets"
    f = root / f"{name}.yaml"
    if not f.is_file():
        raise ConfigError("preset", f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return yaml.safe_load(f.read_text())


def preset(name, overrides=None):
    return from_mapping(apply_overrides(preset_mapping(name), overrides))
