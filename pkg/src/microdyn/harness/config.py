"""Experiment configuration files.

Grammar: ``[section]`` headers, ``key = value`` lines, ``#`` comments,
lists as comma-separated values.  Every key has a documented default, so a
file only needs the values that differ.  Sections:

    [experiment]     scenario
    [particle]       rho0 u0 k0 B0 phase0
    [field]          b_ext theta tau profile b0 gradient curvature product z_min z_max
    [geometry]       length_x drift_x z_entry
    [beam]           n_particles policy z_spread force_law
    [interferometer] path_length
    [coupled]        nx periods t_end br_mean br_amp bi_amp wavenumber safety bc output_stride
    [sweep]          parameter values
    [numerics]       resolution dt seed hbar c
    [output]         path

Metadata files written by a run use the same grammar (plus ``[run]`` and
``[summary]``, which are ignored on load), so a run can be repeated from
its metadata alone.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from ..core import HomogeneousField, UnitsLedger, make_particle
from ..core import affine_field, constant_product_field, quadratic_field
from ..errors import ConfigError, DomainError
from ..stern_gerlach import POLICIES, FORCE_LAWS, MagnetGeometry

SCENARIOS = ("homogeneous", "interferometer", "stern-gerlach", "coupled", "compare")
PROFILES = ("affine", "quadratic", "constant_product")
IGNORED_SECTIONS = ("run", "summary")


@dataclass
class ParticleConfig:
    rho0: float = 1.0
    u0: float = 1.0
    k0: float = 1.0
    B0: float = 1.0
    phase0: float = 0.0


@dataclass
class FieldConfig:
    b_ext: float = 1.0
    theta: float = 0.0
    tau: float = 1.0
    profile: str = "affine"
    b0: float = 1.0
    gradient: float = 0.01
    curvature: float = 0.0
    product: float = 0.1
    z_min: float = -1.0
    z_max: float = 1.0


@dataclass
class GeometryConfig:
    length_x: float = 1.0
    drift_x: float = 1.0
    z_entry: float = 0.0


@dataclass
class BeamConfig:
    n_particles: int = 1000
    policy: str = "phase"
    z_spread: float = 0.0
    force_law: str = "md"


@dataclass
class InterferometerConfig:
    path_length: float = 1.0


@dataclass
class CoupledConfig:
    nx: int = 128
    periods: int = 1
    t_end: float = 1.0
    br_mean: float = 1.0
    br_amp: float = 0.3
    bi_amp: float = 0.2
    wavenumber: float = 1.0
    safety: float = 0.5
    bc: str = "periodic"
    output_stride: int = 1


@dataclass
class SweepConfig:
    parameter: str = ""
    values: tuple = ()


@dataclass
class NumericsConfig:
    resolution: int = 256
    dt: float = 0.01
    seed: int = 0
    hbar: float = 1.0
    c: float = 1.0


@dataclass
class OutputConfig:
    path: str = "results"


@dataclass
class ExperimentConfig:
    scenario: str = "homogeneous"
    particle: ParticleConfig = dc_field(default_factory=ParticleConfig)
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    geometry: GeometryConfig = dc_field(default_factory=GeometryConfig)
    beam: BeamConfig = dc_field(default_factory=BeamConfig)
    interferometer: InterferometerConfig = dc_field(default_factory=InterferometerConfig)
    coupled: CoupledConfig = dc_field(default_factory=CoupledConfig)
    sweep: SweepConfig = dc_field(default_factory=SweepConfig)
    numerics: NumericsConfig = dc_field(default_factory=NumericsConfig)
    output: OutputConfig = dc_field(default_factory=OutputConfig)
    source: Optional[str] = None

    # builders for the domain objects; validate() has already vetted the values

    @property
    def units(self) -> UnitsLedger:
        return UnitsLedger(self.numerics.hbar, self.numerics.c)

    def particle_state(self):
        p = self.particle
        return make_particle(p.rho0, p.u0, p.k0, p.B0, p.phase0)

    def homogeneous_field(self, b_ext=None):
        f = self.field
        return HomogeneousField(f.b_ext if b_ext is None else b_ext, f.theta, f.tau)

    def inhomogeneous_field(self):
        f = self.field
        z_range = (f.z_min, f.z_max)
        if f.profile == "affine":
            return affine_field(f.b0, f.gradient, z_range, f.tau)
        if f.profile == "quadratic":
            return quadratic_field(f.b0, f.gradient, f.curvature, z_range, f.tau)
        return constant_product_field(f.b0, f.product, z_range, f.tau)

    def magnet(self, field=None):
        g = self.geometry
        return MagnetGeometry(g.length_x, g.drift_x, field or self.inhomogeneous_field())


SECTIONS = {
    "particle": ParticleConfig,
    "field": FieldConfig,
    "geometry": GeometryConfig,
    "beam": BeamConfig,
    "interferometer": InterferometerConfig,
    "coupled": CoupledConfig,
    "sweep": SweepConfig,
    "numerics": NumericsConfig,
    "output": OutputConfig,
}

DEFAULT_SWEEPS = {
    "homogeneous": ("b_e", tuple(round(0.1 * i, 10) for i in range(1, 11))),
    "interferometer": ("b_e", tuple(round(1e-3 * i, 10) for i in range(1, 11))),
    "compare": ("scale", (1.0, 2.0, 4.0, 8.0)),
}


def _convert(section, key, raw, kind):
    name = f"{section}.{key}"
    text = raw.strip()
    try:
        if kind is int or kind == "int":
            value = int(text)
        elif kind is float or kind == "float":
            value = float(text)
            if not math.isfinite(value):
                raise ValueError("not finite")
        elif kind is tuple or kind == "tuple":
            items = [item.strip() for item in text.split(",") if item.strip()]
            value = tuple(float(item) for item in items)
            if any(not math.isfinite(v) for v in value):
                raise ValueError("not finite")
        else:
            value = text
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {getattr(kind, '__name__', kind)}",
                          field=name) from None
    return value


def parse_config(text: str, source: Optional[str] = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",),
        empty_lines_in_values=False,
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=source or "<string>")
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"line {exc.lineno}: expected a [section] header", line=exc.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(f"line {exc.lineno}: {exc.message}", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"line {lineno}: cannot parse {exc.errors[0][1]!r}" if exc.errors
                          else str(exc), line=lineno) from None

    cfg = ExperimentConfig(source=source)
    for section in parser.sections():
        if section in IGNORED_SECTIONS:
            continue
        if section == "experiment":
            for key, raw in parser.items(section):
                if key != "scenario":
                    raise ConfigError(f"unknown key experiment.{key}", field=f"experiment.{key}")
                cfg.scenario = raw.strip()
            continue
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]", field=section)
        target = getattr(cfg, section)
        types = {f.name: f.type for f in dataclasses.fields(target)}
        for key, raw in parser.items(section):
            if key not in types:
                raise ConfigError(f"unknown key {section}.{key}", field=f"{section}.{key}")
            setattr(target, key, _convert(section, key, raw, types[key]))
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read, apply defaults to, and validate a configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", field="config") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}", field="config") from None
    cfg = parse_config(text, source=str(path))
    validate(cfg)
    return cfg


def _positive(cfg, dotted, strict=True):
    section, key = dotted.split(".")
    value = getattr(getattr(cfg, section), key)
    if (value <= 0) if strict else (value < 0):
        bound = "> 0" if strict else ">= 0"
        raise ConfigError(f"{dotted} must be {bound}, got {value!r}", field=dotted)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check every parameter the scenario uses and fill in the default sweep."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"experiment.scenario must be one of {SCENARIOS}, got {cfg.scenario!r}",
                          field="experiment.scenario")
    for key in ("hbar", "c", "dt"):
        _positive(cfg, f"numerics.{key}")
    if cfg.numerics.resolution < 16:
        raise ConfigError("numerics.resolution must be >= 16", field="numerics.resolution")
    if cfg.numerics.seed < 0:
        raise ConfigError("numerics.seed must be >= 0", field="numerics.seed")

    try:
        cfg.particle_state()
    except DomainError as exc:
        raise ConfigError(str(exc), field=f"particle.{exc.field}") from None
    _positive(cfg, "field.tau")

    s = cfg.scenario
    if s in ("homogeneous", "interferometer"):
        _positive(cfg, "field.b_ext", strict=False)
        _positive(cfg, "interferometer.path_length")
    if s in ("stern-gerlach", "compare"):
        if cfg.field.profile not in PROFILES:
            raise ConfigError(f"field.profile must be one of {PROFILES}", field="field.profile")
        if not cfg.field.z_min < cfg.field.z_max:
            raise ConfigError("field.z_min must be < field.z_max", field="field.z_max")
        if not cfg.field.z_min <= cfg.geometry.z_entry <= cfg.field.z_max:
            raise ConfigError("geometry.z_entry outside [z_min, z_max]", field="geometry.z_entry")
        _positive(cfg, "geometry.length_x")
        _positive(cfg, "geometry.drift_x", strict=False)
        if cfg.beam.n_particles < 1:
            raise ConfigError("beam.n_particles must be >= 1", field="beam.n_particles")
        if cfg.beam.policy not in POLICIES:
            raise ConfigError(f"beam.policy must be one of {POLICIES}", field="beam.policy")
        if cfg.beam.force_law not in FORCE_LAWS:
            raise ConfigError(f"beam.force_law must be one of {tuple(FORCE_LAWS)}",
                              field="beam.force_law")
        _positive(cfg, "beam.z_spread", strict=False)
        try:
            cfg.inhomogeneous_field()
        except DomainError as exc:
            raise ConfigError(str(exc), field=f"field.{exc.field}") from None
    if s == "coupled":
        c = cfg.coupled
        if c.nx < 8:
            raise ConfigError("coupled.nx must be >= 8", field="coupled.nx")
        for key in ("periods", "t_end", "wavenumber", "safety", "output_stride"):
            _positive(cfg, f"coupled.{key}")
        if c.bc not in ("periodic", "dirichlet"):
            raise ConfigError("coupled.bc must be periodic or dirichlet", field="coupled.bc")

    if s in DEFAULT_SWEEPS:
        expected, default_values = DEFAULT_SWEEPS[s]
        sweep = cfg.sweep
        if not sweep.parameter:
            sweep.parameter = expected
        if sweep.parameter != expected:
            raise ConfigError(f"sweep.parameter for {s} must be {expected!r}",
                              field="sweep.parameter")
        if not sweep.values:
            sweep.values = default_values
        sweep.values = tuple(float(v) for v in sweep.values)
        if any(not math.isfinite(v) for v in sweep.values):
            raise ConfigError("sweep.values must be finite", field="sweep.values")
        lower_ok = (lambda v: v > 0) if expected == "scale" else (lambda v: v >= 0)
        if not all(lower_ok(v) for v in sweep.values):
            raise ConfigError(f"sweep.values out of range for {expected}", field="sweep.values")
    elif cfg.sweep.parameter or cfg.sweep.values:
        raise ConfigError(f"scenario {s} takes no sweep", field="sweep.parameter")
    return cfg


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def config_sections(cfg: ExperimentConfig) -> dict:
    """Fully resolved configuration as {section: {key: text}}."""
    out = {"experiment": {"scenario": cfg.scenario}}
    for section in SECTIONS:
        target = getattr(cfg, section)
        out[section] = {f.name: _format(getattr(target, f.name))
                        for f in dataclasses.fields(target)}
    return out


def render_ini(sections: dict) -> str:
    lines = []
    for section, items in sections.items():
        lines.append(f"[{section}]")
        for key, value in items.items():
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
