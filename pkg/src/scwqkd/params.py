"""Device, channel and modulator parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi
PHASE_TOL = 1e-9


def db_to_linear(db: float) -> float:
    """Power ratio from decibels (-38 dB -> 10**-3.8)."""
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def canonical_phase(phi: float) -> float:
    """Wrap a phase into [0, 2*pi)."""
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    # fmod can leave 2*pi - tiny, which is the same phase as 0
    if TWO_PI - phi < PHASE_TOL:
        phi = 0.0
    return phi


def phases_equal(a: float, b: float, tol: float = PHASE_TOL) -> bool:
    d = canonical_phase(a - b)
    return d < tol or TWO_PI - d < tol


@dataclass(frozen=True)
class SystemParams:
    """Device and channel constants.

    Defaults are the reference parameter set: 0.1 detector efficiency, 5 GHz
    modulation, 50 Hz dark counts, a Bragg-grating filter with tau=0.01,
    r=0.99 and -38 dB sideband suppression, G.652 dispersion, 3.3 ns gates
    at a 10 ns period. All ratios are stored as linear power ratios.
    """

    eta_d: float = 0.1
    omega: float = TWO_PI * 5e9
    gamma_det: float = 50.0
    tau: float = 0.01
    r: float = 0.99
    varrho: float = field(default_factory=lambda: db_to_linear(-38.0))
    gvd: float = -2.0407e-23
    inv_vg: float = 4.9e-6
    delta_t: float = 3.3e-9
    period: float = 1e-8
    fiber_atten_db_per_km: float = 0.2
    beta_rs: float = field(default_factory=lambda: db_to_linear(-40.0))
    f_ec: float = 1.25
    # Where the eavesdropper's beam splitter sits: "front" taps the returning
    # light right after Alice (power eta_A^2 (1 - eta_F)); "weighted" uses the
    # eta_A^2 eta_F (1 - eta_F) trusted-device substitution.
    eve_tap: str = "front"

    def __post_init__(self):
        check = _ParamChecker()
        check.interval("eta_d", self.eta_d, 0.0, 1.0, lo_open=True)
        check.positive("omega", self.omega)
        check.nonneg("gamma_det", self.gamma_det)
        check.interval("tau", self.tau, 0.0, 1.0)
        check.interval("r", self.r, 0.0, 1.0)
        check.interval("varrho", self.varrho, 0.0, 1.0)
        if self.r + self.tau > 1.0 + 1e-12:
            raise ValueError(f"r + tau must not exceed 1 (got r={self.r}, tau={self.tau})")
        check.finite("gvd", self.gvd)
        check.nonneg("inv_vg", self.inv_vg)
        check.positive("period", self.period)
        check.interval("delta_t", self.delta_t, 0.0, self.period, lo_open=True)
        check.nonneg("fiber_atten_db_per_km", self.fiber_atten_db_per_km)
        check.interval("beta_rs", self.beta_rs, 0.0, 1.0)
        if not (math.isfinite(self.f_ec) and self.f_ec >= 1.0):
            raise ValueError(f"f_ec must be >= 1 (got {self.f_ec})")
        if self.eve_tap not in ("front", "weighted"):
            raise ValueError(f"eve_tap must be 'front' or 'weighted' (got {self.eve_tap!r})")

    @property
    def rep_rate(self) -> float:
        return 1.0 / self.period


class _ParamChecker:
    def finite(self, name, v):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite (got {v})")

    def positive(self, name, v):
        self.finite(name, v)
        if v <= 0.0:
            raise ValueError(f"{name} must be > 0 (got {v})")

    def nonneg(self, name, v):
        self.finite(name, v)
        if v < 0.0:
            raise ValueError(f"{name} must be >= 0 (got {v})")

    def interval(self, name, v, lo, hi, lo_open=False):
        self.finite(name, v)
        if v > hi or v < lo or (lo_open and v == lo):
            left = "(" if lo_open else "["
            raise ValueError(f"{name} must lie in {left}{lo}, {hi}] (got {v})")


@dataclass(frozen=True)
class LossBudget:
    """Power transmittances of Alice's device, Bob's detection path and the fiber.

    Light crosses Alice's device and the fiber twice on the way back to Bob's
    detector, and Bob's detection path once.
    """

    eta_a: float
    eta_b: float
    eta_f: float

    def __post_init__(self):
        for name in ("eta_a", "eta_b", "eta_f"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 < v <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1] (got {v})")

    @classmethod
    def from_distance(cls, distance_km: float, eta_a: float, eta_b: float,
                      atten_db_per_km: float = 0.2) -> "LossBudget":
        if distance_km < 0:
            raise ValueError(f"distance_km must be >= 0 (got {distance_km})")
        return cls(eta_a, eta_b, db_to_linear(-atten_db_per_km * distance_km))

    @classmethod
    def from_db(cls, eta_a_db: float, eta_b_db: float, distance_km: float,
                atten_db_per_km: float = 0.2) -> "LossBudget":
        return cls.from_distance(distance_km, db_to_linear(eta_a_db),
                                 db_to_linear(eta_b_db), atten_db_per_km)

    @property
    def amplitude_factor(self) -> float:
        """Amplitude scaling of the state returned to Bob's detector."""
        return self.eta_a * self.eta_f * math.sqrt(self.eta_b)

    @property
    def power_factor(self) -> float:
        return self.eta_a ** 2 * self.eta_f ** 2 * self.eta_b

    @property
    def fiber_loss_db(self) -> float:
        # round off the log10 round-trip noise, and -0.0
        return round(-linear_to_db(self.eta_f), 12) + 0.0


@dataclass(frozen=True)
class ModulatorSettings:
    beta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and 0.0 <= self.beta <= 4.0):
            raise ValueError(f"beta must lie in [0, 4] (got {self.beta})")
        object.__setattr__(self, "phi", canonical_phase(self.phi))


@dataclass(frozen=True)
class DispersionSettings:
    """Fiber length and which dispersion terms are compensated.

    ``compensate_dispersion`` models an ideal, lossless compensator that
    removes every dispersion phase. Group delay only shifts the relative
    modulation phase, which a real system tracks, so it is compensated by
    default.
    """

    distance_km: float = 0.0
    compensate_group_delay: bool = True
    compensate_dispersion: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.distance_km) and self.distance_km >= 0.0):
            raise ValueError(f"distance_km must be >= 0 (got {self.distance_km})")


@dataclass(frozen=True)
class DeviceLosses:
    """Alice's and Bob's device transmittances; the fiber part follows from distance."""

    eta_a: float = field(default_factory=lambda: db_to_linear(-6.0))
    eta_b: float = field(default_factory=lambda: db_to_linear(-6.0))

    @classmethod
    def from_db(cls, eta_a_db: float, eta_b_db: float) -> "DeviceLosses":
        return cls(db_to_linear(eta_a_db), db_to_linear(eta_b_db))

    def at(self, distance_km: float, atten_db_per_km: float = 0.2) -> LossBudget:
        return LossBudget.from_distance(distance_km, self.eta_a, self.eta_b, atten_db_per_km)
