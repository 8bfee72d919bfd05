"""Sideband state of the returned light and photon numbers at Bob's detectors."""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .params import (DispersionSettings, LossBudget, ModulatorSettings,
                     SystemParams)

MAX_ORDER = 64
MAX_ARG = 16.0
ENERGY_TOL = 1e-12
MIN_CUTOFF = 10

RELATION_OFFSETS = {
    "equal": 0.0,
    "quadrature": 0.5 * math.pi,
    "opposite": math.pi,
    "anti-quadrature": 1.5 * math.pi,
}


class DomainError(ValueError):
    pass


def bessel_j(order: int, x: float) -> float:
    """Bessel function of the first kind J_order(x) for |order| <= 64, 0 <= x <= 16."""
    if int(order) != order or abs(order) > MAX_ORDER:
        raise DomainError(f"order must be an integer with |order| <= {MAX_ORDER} (got {order})")
    if not (0.0 <= x <= MAX_ARG):
        raise DomainError(f"x must lie in [0, {MAX_ARG}] (got {x})")
    n = abs(int(order))
    val = float(kernels.bessel_table(np.array([float(x)]), n)[0, n])
    if order < 0 and n % 2:
        val = -val
    return val


def bessel_orders(x: float, nmax: int) -> np.ndarray:
    """J_0(x)..J_nmax(x)."""
    return kernels.bessel_table(np.array([float(x)]), nmax)[0]


def symmetric_bessel(x: float, M: int) -> np.ndarray:
    """J_m(x) for m = -M..M."""
    pos = bessel_orders(x, M)
    m = np.arange(-M, M + 1)
    vals = pos[np.abs(m)]
    vals[(m < 0) & (m % 2 == 1)] *= -1.0
    return vals


@functools.lru_cache(maxsize=None)
def beta_deep_modulation() -> float:
    """Modulation depth at which J_0(2 beta) = 0 (about 1.2)."""
    return brentq(lambda b: bessel_j(0, 2.0 * b), 1.0, 1.4, xtol=1e-15, rtol=1e-15)


def sideband_cutoff(beta_total: float, energy_tol: float = ENERGY_TOL,
                    floor: int = MIN_CUTOFF) -> int:
    """Smallest M >= floor keeping all but ``energy_tol`` of the energy of J_m(beta_total)."""
    row = bessel_orders(beta_total, MAX_ORDER)
    kept = row[0] ** 2
    for M in range(1, MAX_ORDER + 1):
        kept += 2.0 * row[M] ** 2
        if M >= floor and kept >= 1.0 - energy_tol:
            return M
    raise DomainError(f"no cutoff below {MAX_ORDER} reaches energy_tol={energy_tol}")


@dataclass(frozen=True)
class SidebandAmplitudes:
    """Coherent amplitudes on modes m = -M..M (mode m sits at omega_0 + m Omega)."""

    M: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=np.complex128)
        if self.M < 1 or amps.shape != (2 * self.M + 1,):
            raise ValueError(f"amps must have length 2M+1={2 * self.M + 1}, got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def total_energy(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def mode(self, m: int) -> complex:
        return complex(self.amps[m + self.M])

    def to_json(self) -> str:
        return json.dumps({"M": self.M, "amps": [[a.real, a.imag] for a in self.amps]})

    @classmethod
    def from_json(cls, text: str) -> "SidebandAmplitudes":
        d = json.loads(text)
        return cls(d["M"], np.array([complex(re, im) for re, im in d["amps"]]))


def modulator_matrix(settings: ModulatorSettings, M: int) -> np.ndarray:
    """(2M+1)x(2M+1) matrix sending input mode k to output mode k+l with weight J_l(beta) e^{i l phi}."""
    if M < 1:
        raise ValueError(f"M must be >= 1 (got {M})")
    pos = bessel_orders(settings.beta, 2 * M)
    idx = np.arange(-M, M + 1)
    lag = idx[:, None] - idx[None, :]
    j = pos[np.abs(lag)]
    j = np.where((lag < 0) & (lag % 2 == 1), -j, j)
    return j * np.exp(1j * lag * settings.phi)


def apply_modulator(state: SidebandAmplitudes, settings: ModulatorSettings) -> SidebandAmplitudes:
    return SidebandAmplitudes(state.M, modulator_matrix(settings, state.M) @ state.amps)


def dispersion_phases(params: SystemParams, disp: DispersionSettings, M: int) -> np.ndarray:
    """Phase picked up by mode m over the fiber, m = -M..M."""
    m = np.arange(-M, M + 1, dtype=np.float64)
    if disp.compensate_dispersion:
        return np.zeros_like(m)
    g = 0.0 if disp.compensate_group_delay else params.inv_vg
    return m * params.omega * (g + m * params.gvd * params.omega / 2.0) * disp.distance_km


def alice_return_state(params: SystemParams, losses: LossBudget, alpha0: float,
                       settings: ModulatorSettings, disp: DispersionSettings,
                       M: int | None = None) -> SidebandAmplitudes:
    """State reaching Bob's modulator after Alice's encoding and the return trip."""
    if alpha0 < 0:
        raise ValueError(f"alpha0 must be >= 0 (got {alpha0})")
    if M is None:
        M = sideband_cutoff(2.0 * settings.beta)
    m = np.arange(-M, M + 1)
    amps = (losses.amplitude_factor * alpha0 * symmetric_bessel(settings.beta, M)
            * np.exp(1j * (m * settings.phi + dispersion_phases(params, disp, M))))
    return SidebandAmplitudes(M, amps)


def _filter_weights(params: SystemParams, detector: str) -> tuple[float, float]:
    """(sideband weight, carrier weight) of a detector behind the filter."""
    if detector == "sideband":
        return 1.0 - params.varrho, params.tau
    if detector == "carrier":
        return params.varrho, params.r
    raise ValueError(f"unknown detector {detector!r}")


def mean_photons_closed_form(params: SystemParams, losses: LossBudget, alpha0: float,
                             beta: float, match: str) -> float:
    """Mean signal photons at the sideband detector, dispersion ignored."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0 (got {beta})")
    scale = alpha0 ** 2 * losses.power_factor
    if match == "opposite":
        return scale * params.tau
    if match != "equal":
        raise ValueError(f"match must be 'equal' or 'opposite' (got {match!r})")
    j2 = bessel_j(0, 2.0 * beta) ** 2
    return scale * ((1.0 - params.varrho) * (1.0 - j2) + params.tau * j2)


def mean_photons_dispersive(state: SidebandAmplitudes, bob: ModulatorSettings,
                            params: SystemParams, branch: str) -> float:
    """One addend of the sideband-detector photon number after Bob's modulator.

    ``branch="sidebands"`` gives (1 - varrho) * sum_{m != 0} |a'_m|^2 and
    ``branch="carrier"`` gives tau * |a'_0|^2.
    """
    out = modulator_matrix(bob, state.M) @ state.amps
    power = np.abs(out) ** 2
    carrier = power[state.M]
    if branch == "sidebands":
        return float((1.0 - params.varrho) * (power.sum() - carrier))
    if branch == "carrier":
        return float(params.tau * carrier)
    raise ValueError(f"branch must be 'sidebands' or 'carrier' (got {branch!r})")


def relation_energies(params: SystemParams, betas, disp: DispersionSettings,
                      offsets, M: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sideband and carrier energies after Bob's modulator, per unit returned amplitude.

    Alice encodes phase 0 and Bob uses the same depth with phase offset
    ``offsets[j]``; energies depend only on that relative phase. Returns two
    arrays of shape (len(betas), len(offsets)).
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=np.float64))
    offsets = np.atleast_1d(np.asarray(offsets, dtype=np.float64))
    if M is None:
        M = sideband_cutoff(2.0 * float(betas.max()))
    jrows = kernels.bessel_table(betas, 2 * M)
    m = np.arange(-M, M + 1)
    jm = jrows[:, np.abs(m)] * np.where((m < 0) & (m % 2 == 1), -1.0, 1.0)
    amps = jm * np.exp(1j * dispersion_phases(params, disp, M))[None, :]
    return kernels.modulated_energies(amps, jrows, offsets)


def detector_photons(params: SystemParams, losses: LossBudget, alpha0, sideband_energy,
                     carrier_energy, detector: str):
    """Signal photons reaching one of Bob's detectors (works elementwise on arrays)."""
    w_sb, w_c = _filter_weights(params, detector)
    scale = np.asarray(alpha0, dtype=np.float64) ** 2 * losses.power_factor
    return scale * (w_sb * sideband_energy + w_c * carrier_energy)


def rayleigh_photons(params: SystemParams, losses: LossBudget, alpha0, bob_beta: float,
                     weights: str):
    """Backscattered reference photons reaching a detector after Bob's modulator.

    Only fiber loss scatters; the backscatter crosses Bob's detection path once
    and sees only Bob's modulation.
    """
    j2 = bessel_j(0, bob_beta) ** 2
    if weights == "sideband_detector":
        share = (1.0 - params.varrho) * (1.0 - j2) + params.tau * j2
    elif weights == "carrier_detector":
        share = params.r * j2 + params.varrho * (1.0 - j2)
    else:
        raise ValueError(f"unknown weights {weights!r}")
    alpha0 = np.asarray(alpha0, dtype=np.float64)
    out = share * (1.0 - losses.eta_f ** 2) * losses.eta_b * params.beta_rs * alpha0 ** 2
    return float(out) if out.ndim == 0 else out
