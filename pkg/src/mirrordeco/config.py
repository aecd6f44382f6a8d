"""Experiment configuration: a TOML file with one table per section.

Every field has a default, so an empty file reproduces the reference mode-count
ensemble (identical modes, m' = 1e-6, a = 1e-5, f = 1e-14, hbar = 1).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .errors import ConfigError, InvalidInputError
from .model import ModelSpec, ModeSet, PointerSpec, build_effective_model

SWEEP_VARIABLES = ("t", "N", "a", "sigma_x")


@dataclass
class ModelSection:
    # full laboratory description (used when masses is non-empty)
    masses: list = field(default_factory=list)
    couplings: list = field(default_factory=list)
    packet_width: float = 1e-5
    mode_widths: list = field(default_factory=list)
    # direct mode list
    mode_masses: list = field(default_factory=lambda: [1e-6])
    mode_forces: list = field(default_factory=lambda: [1e-14])
    mode_count: int = 1_000_000

    @property
    def is_spec(self) -> bool:
        return bool(self.masses)


@dataclass
class PointerSection:
    total_mass: float = 1.0
    coupling: float = 1.0
    width: float = 1.0
    position: float = 0.0
    derive: bool = True  # take M and G from the laboratory model when present


@dataclass
class CavitySection:
    alpha: list = field(default_factory=lambda: [1.0, 0.0])
    omega0: float = 1.0
    tol: float = 1e-10


@dataclass
class SweepSection:
    variable: str = "t"
    start: float = 0.0
    stop: float = 5.0
    count: int = 51
    spacing: str = "linear"


@dataclass
class Fig3Section:
    mode_counts: list = field(default_factory=lambda: [1_000_000, 2_000_000, 4_000_000, 10_000_000])
    t_start: float = 0.0
    t_stop: float = 5.0
    count: int = 101


@dataclass
class OutputSection:
    csv: str = ""
    svg: str = ""


@dataclass
class OracleSection:
    enabled: bool = True
    tolerance: float = 1e-6
    samples: int = 20
    hamiltonian_specs: int = 20
    hamiltonian_n: int = 8
    width_dropped: bool = False


@dataclass
class ExperimentConfig:
    hbar: float = 1.0
    m: int = 1
    n: int = 0
    t: float = 1.0
    model: ModelSection = field(default_factory=ModelSection)
    pointer: PointerSection = field(default_factory=PointerSection)
    cavity: CavitySection = field(default_factory=CavitySection)
    sweep: SweepSection = field(default_factory=SweepSection)
    fig3: Fig3Section = field(default_factory=Fig3Section)
    outputs: OutputSection = field(default_factory=OutputSection)
    oracle: OracleSection = field(default_factory=OracleSection)

    # -- derived objects ---------------------------------------------------

    def model_spec(self) -> ModelSpec:
        if not self.model.is_spec:
            raise ConfigError("model.masses", "a laboratory model (masses, couplings) is required")
        try:
            return ModelSpec(
                masses=self.model.masses,
                couplings=self.model.couplings,
                omega0=self.cavity.omega0,
                alpha=self.alpha,
                packet_width=self.model.packet_width,
                pointer_width=self.pointer.width,
                hbar=self.hbar,
                mode_widths=self.model.mode_widths or None,
            )
        except InvalidInputError as exc:
            raise ConfigError("model", str(exc)) from exc

    def modes(self) -> ModeSet:
        try:
            if self.model.is_spec:
                return build_effective_model(self.model_spec()).modes()
            widths = self.model.mode_widths or [self.model.packet_width]
            return ModeSet(self.model.mode_masses, self.model.mode_forces,
                           widths, self.model.mode_count)
        except InvalidInputError as exc:
            raise ConfigError("model", str(exc)) from exc

    def pointer_spec(self) -> PointerSpec:
        p = self.pointer
        if self.model.is_spec and p.derive:
            eff = build_effective_model(self.model_spec())
            return eff.pointer(p.width, p.position)
        return PointerSpec(p.total_mass, p.coupling, p.width, p.position)

    @property
    def alpha(self) -> complex:
        return complex(*self.alpha_pair)

    @property
    def alpha_pair(self):
        a = self.cavity.alpha
        return (a[0], a[1] if len(a) > 1 else 0.0)

    # -- (de)serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        cfg = _build(cls, data, "")
        cfg.validate()
        return cfg

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentConfig":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("<file>", str(exc)) from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_toml(Path(path).read_text())

    def validate(self) -> None:
        def positive(path, value):
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(path, f"must be a positive number, got {value!r}")

        positive("hbar", self.hbar)
        for label in ("m", "n"):
            if getattr(self, label) < 0:
                raise ConfigError(label, "Fock labels must be non-negative")
        if self.model.mode_count < 1:
            raise ConfigError("model.mode_count", "mode multiplier must be >= 1")
        positive("model.packet_width", self.model.packet_width)
        positive("pointer.width", self.pointer.width)
        positive("pointer.total_mass", self.pointer.total_mass)
        positive("cavity.omega0", self.cavity.omega0)
        if not 0 < self.cavity.tol < 1:
            raise ConfigError("cavity.tol", "must lie in (0, 1)")
        if len(self.cavity.alpha) not in (1, 2):
            raise ConfigError("cavity.alpha", "expected [re] or [re, im]")
        s = self.sweep
        if s.variable not in SWEEP_VARIABLES:
            raise ConfigError("sweep.variable", f"must be one of {SWEEP_VARIABLES}")
        if s.spacing not in ("linear", "log"):
            raise ConfigError("sweep.spacing", "must be 'linear' or 'log'")
        if not (math.isfinite(s.start) and math.isfinite(s.stop) and s.start < s.stop):
            raise ConfigError("sweep.start", "range must be finite with start < stop")
        if s.count < 2:
            raise ConfigError("sweep.count", "need at least 2 samples")
        if s.spacing == "log" and s.start <= 0:
            raise ConfigError("sweep.start", "log spacing needs a positive start")
        f = self.fig3
        if f.count < 2 or not f.t_start < f.t_stop:
            raise ConfigError("fig3", "need t_start < t_stop and count >= 2")
        if not f.mode_counts or any(int(k) < 1 for k in f.mode_counts):
            raise ConfigError("fig3.mode_counts", "mode counts must be >= 1")
        if self.oracle.samples < 0 or self.oracle.hamiltonian_specs < 0:
            raise ConfigError("oracle.samples", "must be non-negative")
        positive("oracle.tolerance", self.oracle.tolerance)
        self.modes()


def _build(cls, data, prefix):
    if not isinstance(data, dict):
        raise ConfigError(prefix or "<root>", "expected a table")
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in known:
            raise ConfigError(path, "unknown field")
        default = known[key].default_factory() if known[key].default_factory is not dataclasses.MISSING \
            else known[key].default
        if dataclasses.is_dataclass(default):
            kwargs[key] = _build(type(default), value, path)
        else:
            kwargs[key] = _coerce(path, default, value)
    return cls(**kwargs)


def _coerce(path, default, value):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(path, f"expected an array, got {value!r}")
        for i, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{path}[{i}]", f"expected a number, got {item!r}")
        return list(value)
    return value


def sweep_values(s: SweepSection):
    import numpy as np
    if s.spacing == "log":
        return np.geomspace(s.start, s.stop, s.count)
    return np.linspace(s.start, s.stop, s.count)

