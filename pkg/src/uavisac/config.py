"""Simulation configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

SPEED_OF_LIGHT = 299_792_458.0


class ConfigError(ValueError):
    """Raised for unreadable or invalid configuration files."""


@dataclass(frozen=True)
class ObjectSpec:
    """Initial condition of one ground object: caption angle (deg), speed, acceleration."""

    theta0_deg: float
    v0: float
    a: float = 0.0


MULTI_OBJECT = (ObjectSpec(75.0, 30.0, -5.0), ObjectSpec(135.0, -3.0, 1.0))
SINGLE_OBJECT = (ObjectSpec(60.0, 30.0, -5.0),)


@dataclass(frozen=True)
class SimConfig:
    # array / radio
    N_t: int = 30
    N_r: int = 30
    spacing_wl: float = 0.5  # element spacing in wavelengths
    f_c: float = 30e9
    kappa: float = 80e6
    iota: float = 1e-5
    G_m: float = 10.0
    alpha0: float = 1.0
    sigma_c2: float = 1.0
    sigma_r2: float = 1.0
    epsilon: complex = 120 + 120j
    P_T: float = 1000.0
    # evolution noise std devs
    sigma1_deg: float = 0.02
    sigma2: float = 0.2
    sigma3: float = 0.5
    dT: float = 0.01
    # beam design
    gamma_min: float = 0.5
    B: float = 0.05
    l: float = 3.0
    resolution_deg: float = 0.1
    sca_tol: float = 1e-4
    sca_max_iter: int = 15
    irm_max_iter: int = 20
    irm_w0: float = 0.01
    irm_rho: float = 2.0
    irm_tol: float = 1e-6  # r_p threshold in units of P_T / N_t
    # sensing / tracking
    angle_var_ceiling_deg2: float = 1.0
    mse0_inflation: float = 10.0
    meas_noise_scale: float = 1.0  # 0 gives noise-free measurements
    truth_model: str = "exact"  # "matched" moves objects with the tracker's own evolution model
    # frame structure
    slots_per_frame: int = 10
    # scenario
    h: float = 100.0
    x_u: float = 0.0
    v_u: float = 15.0
    theta_u_deg: float = -90.0
    objects: tuple[ObjectSpec, ...] = field(default=MULTI_OBJECT)
    seed: int = 0

    def __post_init__(self):
        self.validate()

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    @property
    def spacing(self) -> float:
        return self.spacing_wl * self.wavelength

    @property
    def theta_u(self) -> float:
        return math.radians(self.theta_u_deg)

    @property
    def resolution(self) -> float:
        return math.radians(self.resolution_deg)

    @property
    def evolution_std(self) -> tuple[float, float, float]:
        return (math.radians(self.sigma1_deg), self.sigma2, self.sigma3)

    @property
    def angle_var_ceiling(self) -> float:
        return math.radians(1.0) ** 2 * self.angle_var_ceiling_deg2

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        positive = ("spacing_wl", "f_c", "kappa", "iota", "G_m", "alpha0", "sigma_c2",
                    "sigma_r2", "P_T", "sigma1_deg", "sigma2", "sigma3", "dT", "B", "l",
                    "resolution_deg", "sca_tol", "irm_w0", "irm_tol", "angle_var_ceiling_deg2",
                    "mse0_inflation", "h")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if self.N_t < 2:
            raise ConfigError(f"N_t must be >= 2, got {self.N_t}")
        if self.N_r < 1:
            raise ConfigError(f"N_r must be >= 1, got {self.N_r}")
        if self.gamma_min < 0:
            raise ConfigError(f"gamma_min must be >= 0, got {self.gamma_min}")
        if self.v_u < 0:
            raise ConfigError(f"v_u must be >= 0, got {self.v_u}")
        if self.irm_rho < 1:
            raise ConfigError(f"irm_rho must be >= 1, got {self.irm_rho}")
        if self.sca_max_iter < 1 or self.irm_max_iter < 1:
            raise ConfigError("iteration caps must be >= 1")
        if not (math.isfinite(self.meas_noise_scale) and self.meas_noise_scale >= 0):
            raise ConfigError(f"meas_noise_scale must be >= 0, got {self.meas_noise_scale!r}")
        if self.truth_model not in ("exact", "matched"):
            raise ConfigError(f"truth_model must be 'exact' or 'matched', got {self.truth_model!r}")
        if self.slots_per_frame < 2:
            raise ConfigError(f"slots_per_frame must be >= 2, got {self.slots_per_frame}")
        if not self.objects:
            raise ConfigError("at least one object is required")
        for obj in self.objects:
            if not 0 < obj.theta0_deg < 180:
                raise ConfigError(f"object angle must lie in (0, 180) deg, got {obj.theta0_deg}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def _parse_objects(text: str) -> tuple[ObjectSpec, ...]:
    # "75:30:-5, 135:-3:1"
    specs = []
    for chunk in text.split(","):
        parts = [p.strip() for p in chunk.strip().split(":")]
        if len(parts) not in (2, 3):
            raise ValueError(f"expected theta0_deg:v0[:a], got {chunk.strip()!r}")
        specs.append(ObjectSpec(*(float(p) for p in parts)))
    return tuple(specs)


def format_objects(objects) -> str:
    return ", ".join(f"{o.theta0_deg:g}:{o.v0:g}:{o.a:g}" for o in objects)


def _converter(f: dataclasses.Field):
    if f.name == "objects":
        return _parse_objects
    if f.type in ("int", int):
        return int
    if f.type in ("str", str):
        return str
    if f.type in ("complex", complex):
        return lambda s: complex(s.replace(" ", ""))
    return float


FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def parse_config(text: str, source: str = "<string>") -> SimConfig:
    values = {}
    seen_at = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen_at:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} (first set on line {seen_at[key]})")
        try:
            values[key] = _converter(FIELDS[key])(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: cannot parse {key!r}: {exc}") from None
        seen_at[key] = lineno
    try:
        return SimConfig(**values)
    except ConfigError as exc:
        bad = next((k for k in seen_at if str(exc).startswith(k)), None)
        where = f"{source}:{seen_at[bad]}" if bad else source
        raise ConfigError(f"{where}: {exc}") from None


def load_config(path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
