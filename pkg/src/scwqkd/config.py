"""Flat key = value run configuration (a TOML subset)."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .params import (DeviceLosses, DispersionSettings, SystemParams, db_to_linear,
                     linear_to_db)
from .rates import Regime

DEFAULT_ORIGINAL_BETA = 0.38


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class RunConfig:
    # device and channel
    eta_d: float = 0.1
    omega: float = 2.0 * math.pi * 5e9
    gamma_det: float = 50.0
    tau: float = 0.01
    r: float = 0.99
    varrho_db: float = -38.0
    gvd: float = -2.0407e-23
    inv_vg: float = 4.9e-6
    delta_t: float = 3.3e-9
    period: float = 1e-8
    eta_a_db: float = -6.0
    eta_b_db: float = -6.0
    fiber_atten_db_per_km: float = 0.2
    beta_rs_db: float = -40.0
    f_ec: float = 1.25
    eve_tap: str = "front"
    # operating point
    regime: str = "original"
    alpha0: float = 1.5
    beta: float | None = None
    distance_km: float = 0.0
    compensate_dispersion: bool = False
    compensate_group_delay: bool = True
    # sweeps and optimizer
    d_start: float = 0.0
    d_end: float = 80.0
    d_step: float = 5.0
    alpha0_min: float = 0.0
    alpha0_max: float = 5.0
    beta_min: float = 0.05
    beta_max: float = 2.4
    coarse_grid: int = 64
    refine_iters: int = 40
    # Monte-Carlo
    pulses: int = 10_000_000
    seed: int | None = None
    double_click_policy: str = "discard"
    dead_time: float = 0.0
    # output
    format: str = "csv"
    out: str | None = None

    def system_params(self) -> SystemParams:
        try:
            return SystemParams(
                eta_d=self.eta_d, omega=self.omega, gamma_det=self.gamma_det, tau=self.tau,
                r=self.r, varrho=db_to_linear(self.varrho_db), gvd=self.gvd,
                inv_vg=self.inv_vg, delta_t=self.delta_t, period=self.period,
                fiber_atten_db_per_km=self.fiber_atten_db_per_km,
                beta_rs=db_to_linear(self.beta_rs_db), f_ec=self.f_ec, eve_tap=self.eve_tap)
        except ValueError as exc:
            key = str(exc).split(" ", 1)[0]
            key = {"varrho": "varrho_db", "beta_rs": "beta_rs_db"}.get(key, key)
            raise ConfigError(key, str(exc)) from None

    def device(self) -> DeviceLosses:
        for key in ("eta_a_db", "eta_b_db"):
            if getattr(self, key) > 0:
                raise ConfigError(key, f"device loss must be <= 0 dB (got {getattr(self, key)})")
        return DeviceLosses.from_db(self.eta_a_db, self.eta_b_db)

    def regime_enum(self) -> Regime:
        try:
            return Regime(self.regime)
        except ValueError:
            raise ConfigError("regime", f"unknown regime {self.regime!r}") from None

    def beta_for_regime(self) -> float | None:
        """Explicit beta for the original regime, None (beta_DM) for deep ones."""
        regime = self.regime_enum()
        if regime.is_deep:
            if self.beta is not None:
                try:
                    regime.resolve_beta(self.beta)
                except ValueError as exc:
                    raise ConfigError("beta", str(exc)) from None
            return None
        beta = DEFAULT_ORIGINAL_BETA if self.beta is None else self.beta
        if not 0.0 <= beta <= 4.0:
            raise ConfigError("beta", f"beta must lie in [0, 4] (got {beta})")
        return beta

    def dispersion(self, distance_km: float | None = None) -> DispersionSettings:
        d = self.distance_km if distance_km is None else distance_km
        if not (math.isfinite(d) and d >= 0):
            raise ConfigError("distance_km", f"distance must be >= 0 (got {d})")
        return DispersionSettings(d, self.compensate_group_delay, self.compensate_dispersion)

    def validate(self) -> None:
        self.system_params()
        self.device()
        self.beta_for_regime()
        self.dispersion()
        if self.alpha0 < 0:
            raise ConfigError("alpha0", f"alpha0 must be >= 0 (got {self.alpha0})")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", f"format must be csv or json (got {self.format!r})")
        if self.double_click_policy not in ("discard", "random_bit"):
            raise ConfigError("double_click_policy", "must be 'discard' or 'random_bit'")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
# linear spellings accepted next to the dB keys
_LINEAR_ALIASES = {"varrho": "varrho_db", "beta_rs": "beta_rs_db",
                   "eta_a": "eta_a_db", "eta_b": "eta_b_db"}
_OPTIONAL = {"beta", "seed", "out"}


def _coerce(key: str, value):
    f = _FIELDS[key]
    kind = str(f.type)
    if value is None and key in _OPTIONAL:
        return None
    if kind.startswith("bool"):
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true/false (got {value!r})")
        return value
    if kind.startswith("int"):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer (got {value!r})")
        return value
    if kind.startswith("float"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number (got {value!r})")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(key, f"expected a string (got {value!r})")
    return value


def config_from_mapping(data: dict, base: RunConfig | None = None) -> RunConfig:
    cfg = dataclasses.replace(base) if base is not None else RunConfig()
    seen = set()
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(key, "nested tables are not supported; use flat keys")
        if key in _LINEAR_ALIASES:
            target = _LINEAR_ALIASES[key]
            if target in data:
                raise ConfigError(key, f"give either {key} or {target}, not both")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 < value <= 1:
                raise ConfigError(key, f"linear ratio must lie in (0, 1] (got {value!r})")
            setattr(cfg, target, linear_to_db(float(value)))
            seen.add(target)
            continue
        if key not in _FIELDS:
            raise ConfigError(key, "unknown configuration key")
        setattr(cfg, key, _coerce(key, value))
        seen.add(key)
    return cfg


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    return config_from_mapping(data, base)


_KEY_NOTES = {
    "eta_d": "detector quantum efficiency",
    "omega": "modulation angular frequency, 2*pi * 5 GHz [rad/s]",
    "gamma_det": "dark count rate [Hz]",
    "tau": "filter carrier transmittance",
    "r": "filter carrier reflectance",
    "varrho_db": "filter sideband suppression factor [dB]",
    "gvd": "group velocity dispersion [s^2/km]",
    "inv_vg": "inverse group delay [s/km]",
    "delta_t": "gating time [s]",
    "period": "pulse repetition period [s]",
    "eta_a_db": "Alice's device losses [dB]",
    "eta_b_db": "Bob's device losses [dB]",
    "fiber_atten_db_per_km": "fiber attenuation [dB/km]",
    "beta_rs_db": "Rayleigh backscattering coefficient [dB]",
    "f_ec": "error-correction efficiency f(Q)",
}


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return repr(v)


def dump_config(cfg: RunConfig) -> str:
    """Render a config as flat TOML; unset optional keys become comments."""
    lines = []
    for name in _FIELDS:
        value = getattr(cfg, name)
        note = _KEY_NOTES.get(name)
        suffix = f"  # {note}" if note else ""
        if value is None:
            if name == "beta":
                lines.append(f"# beta = {DEFAULT_ORIGINAL_BETA!r}  "
                             "# original regime default; deep regimes use beta_DM")
            else:
                lines.append(f"# {name} =")
            continue
        lines.append(f"{name} = {_toml_value(value)}{suffix}")
    return "\n".join(lines) + "\n"
