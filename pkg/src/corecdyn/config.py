"""Flat ``key = value`` experiment configuration files.

Keys are dotted (``thickness.d0 = 0.5``), ``#`` starts a comment, and every
value is decimal text. Unknown or duplicated keys are rejected. See
``KEYS`` for the full list with defaults.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .geometry import ConvexCore
from .thickness import DomainShape, Harmonic, ThicknessProfile


def _harmonics(text: str) -> tuple[Harmonic, ...]:
    """``"eps:m[:phase], ..."``; an empty string means a constant profile."""
    out = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        fields = item.split(":")
        if len(fields) not in (2, 3):
            raise ConfigError(f"harmonic {item!r} must look like eps:m or eps:m:phase")
        amp, freq = float(fields[0]), int(fields[1])
        phase = float(fields[2]) if len(fields) == 3 else 0.0
        out.append(Harmonic(amp, freq, phase))
    return tuple(out)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


# key -> (parser, default); None means "required when used"
KEYS = {
    "core.kind": (str, "unit_circle"),
    "core.radius": (float, 1.0),
    "core.a": (float, None),
    "core.b": (float, None),
    "thickness.d0": (float, None),
    "thickness.harmonics": (_harmonics, ()),
    "map.variant": (str, "exact"),
    "seed": (int, 42),
    "simulate.theta0": (float, 1.0),
    "simulate.max_iters": (int, 1000),
    "simulate.tol": (float, 1e-10),
    "simulate.period_max": (int, 16),
    "simulate.cycle_tol": (float, 1e-9),
    "simulate.bins": (int, 64),
    "classify.cycle_tol": (float, 1e-6),
    "lyapunov.n_transient": (int, 1000),
    "lyapunov.n_sample": (int, 10000),
    "admissibility.grid": (int, 2048),
    "fixed_points.grid": (int, 4096),
    "scan.m": (int, None),
    "scan.d0_min": (float, None),
    "scan.d0_max": (float, None),
    "scan.eps_min": (float, None),
    "scan.eps_max": (float, None),
    "scan.resolution": (int, 8),
    "scan.d0_resolution": (int, None),
    "scan.eps_resolution": (int, None),
    "scan.theta0": (float, None),
    "scan.theta0_jitter": (float, 0.0),
    "scan.max_iters": (int, 2000),
    "scan.n_transient": (int, 500),
    "scan.n_sample": (int, 1000),
    "flow.horizon": (float, 10.0),
    "flow.scales": (_floats, ()),
    "flow.theta0": (float, None),
}

POSITIVE = {
    "core.radius", "core.a", "core.b", "thickness.d0", "simulate.max_iters", "simulate.tol",
    "simulate.period_max", "simulate.cycle_tol", "simulate.bins", "classify.cycle_tol",
    "lyapunov.n_sample", "admissibility.grid", "fixed_points.grid", "scan.m", "scan.resolution",
    "scan.d0_resolution", "scan.eps_resolution", "scan.max_iters", "scan.n_sample", "flow.horizon",
}


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict
    source: str = "<string>"

    def __getitem__(self, key: str):
        value = self.values[key]
        if value is None:
            raise ConfigError(f"{self.source}: missing required key {key!r}")
        return value

    def get(self, key: str, fallback=None):
        value = self.values[key]
        return fallback if value is None else value

    @property
    def variant(self) -> str:
        return self["map.variant"]

    def core(self) -> ConvexCore:
        kind = self["core.kind"]
        if kind == "unit_circle":
            return ConvexCore.unit_circle()
        if kind == "circle":
            return ConvexCore.circle(self["core.radius"])
        if kind == "ellipse":
            return ConvexCore.ellipse(self["core.a"], self["core.b"])
        raise ConfigError(f"{self.source}: unknown core.kind {kind!r}")

    def thickness(self) -> ThicknessProfile:
        return ThicknessProfile(self["thickness.d0"], self["thickness.harmonics"])

    def shape(self) -> DomainShape:
        return DomainShape(self.core(), self.thickness())

    def scan_m(self) -> int:
        m = self.get("scan.m")
        if m is not None:
            return m
        harmonics = self["thickness.harmonics"]
        return harmonics[0].frequency if harmonics else 1

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        values = dict(self.values)
        for key, value in overrides.items():
            if key not in KEYS:
                raise ConfigError(f"unknown key {key!r}")
            values[key] = value
        cfg = ExperimentConfig(values, self.source)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for key in POSITIVE:
            value = self.values[key]
            if value is not None and not value > 0:
                raise ConfigError(f"{self.source}: {key} must be positive, got {value!r}")
        for key, value in self.values.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"{self.source}: {key} must be finite")
        if self.values["map.variant"] not in ("exact", "first-order"):
            raise ConfigError(f"{self.source}: map.variant must be 'exact' or 'first-order'")
        if self.values["core.kind"] not in ("unit_circle", "circle", "ellipse"):
            raise ConfigError(f"{self.source}: unknown core.kind {self.values['core.kind']!r}")
        for axis in ("d0", "eps"):
            lo, hi = self.values[f"scan.{axis}_min"], self.values[f"scan.{axis}_max"]
            if lo is not None and hi is not None and hi < lo:
                raise ConfigError(f"{self.source}: empty scan range for {axis}: [{lo}, {hi}]")
        if any(s <= 0 for s in self.values["flow.scales"]):
            raise ConfigError(f"{self.source}: flow.scales must be positive")


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                       inline_comment_prefixes=("#",), interpolation=None,
                                       strict=True, empty_lines_in_values=False)
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    values = {key: default for key, (_, default) in KEYS.items()}
    for key, raw in parser.items("config"):
        if key not in KEYS:
            raise ConfigError(f"{source}: unknown key {key!r}")
        convert = KEYS[key][0]
        try:
            values[key] = convert(raw.strip())
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{source}: bad value for {key}: {raw!r} ({exc})") from exc
    cfg = ExperimentConfig(values, source)
    cfg.validate()
    return cfg


PRESETS = ("fig1.cfg", "table1.cfg", "chaos.cfg")


def preset_path(name: str):
    return resources.files("corecdyn") / "presets" / name


def load_config(path: str) -> ExperimentConfig:
    """Read a config file; bare preset names (``fig1.cfg``) resolve to the bundled presets."""
    p = Path(path)
    if p.exists():
        return parse_config(p.read_text(), str(p))
    name = path if path.endswith(".cfg") else path + ".cfg"
    if name in PRESETS:
        return parse_config(preset_path(name).read_text(), name)
    raise ConfigError(f"config file {path!r} not found")
