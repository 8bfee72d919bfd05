"""Detection probabilities, QBER, eavesdropper information and key-rate bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from enum import Enum

import numpy as np

from .model import (DomainError, beta_deep_modulation, bessel_j, detector_photons,
                    rayleigh_photons, relation_energies, sideband_cutoff,
                    symmetric_bessel)
from .params import DispersionSettings, LossBudget, SystemParams

BETA_DM_TOL = 1e-9


class Regime(str, Enum):
    ORIGINAL = "original"
    DEEP = "deep"
    DEEP_CARRIER = "deep-carrier"

    @property
    def is_deep(self) -> bool:
        return self is not Regime.ORIGINAL

    def resolve_beta(self, beta: float | None = None) -> float:
        """Depth to use in this regime; deep variants only accept beta_DM."""
        if not self.is_deep:
            if beta is None:
                raise ValueError("the original regime needs an explicit beta")
            return float(beta)
        bdm = beta_deep_modulation()
        if beta is not None and abs(beta - bdm) > BETA_DM_TOL:
            raise ValueError(f"{self.value} regime runs at beta_DM={bdm!r}, got beta={beta}")
        return bdm


@dataclass(frozen=True)
class RatePoint:
    distance_km: float
    loss_db: float
    alpha0: float
    beta: float
    qber: float
    p_b: float
    chi_bits: float
    key_rate_bps: float
    saturated_flag: bool = False

    @property
    def chi(self) -> float:
        return self.chi_bits

    @property
    def key_rate(self) -> float:
        return self.key_rate_bps

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_dict(self) -> dict:
        return asdict(self)


def _click(n_signal, n_noise, params: SystemParams):
    raw = (params.eta_d * np.asarray(n_signal) / params.period + params.gamma_det
           + params.eta_d * np.asarray(n_noise) / params.period) * params.delta_t
    return np.minimum(raw, 1.0), raw > 1.0


def click_probability(n_signal: float, n_noise: float, params: SystemParams) -> float:
    """Per-gate click probability of a gated single-photon detector, clamped to 1."""
    if n_signal < 0 or n_noise < 0:
        raise ValueError("photon numbers must be >= 0")
    return float(_click(n_signal, n_noise, params)[0])


def binary_entropy(q):
    """Shannon binary entropy in bits, with H(0) = H(1) = 0."""
    q_arr = np.asarray(q, dtype=np.float64)
    if np.any((q_arr < 0.0) | (q_arr > 1.0)) or np.any(np.isnan(q_arr)):
        raise DomainError(f"binary_entropy needs q in [0, 1] (got {q})")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -q_arr * np.log2(q_arr) - (1.0 - q_arr) * np.log2(1.0 - q_arr)
    h = np.where((q_arr == 0.0) | (q_arr == 1.0), 0.0, h)
    return float(h) if h.ndim == 0 else h


def _ratio_guard(err, total):
    """QBER err/total and sifted probability total/2, with Q = 1/2 when nothing clicks."""
    err = np.asarray(err, dtype=np.float64)
    total = np.asarray(total, dtype=np.float64)
    safe = np.where(total > 0.0, total, 1.0)
    q = np.where(total > 0.0, err / safe, 0.5)
    return np.clip(q, 0.0, 1.0), total / 2.0


class _Evaluator:
    """Detector statistics at one (beta, dispersion) setting, vectorized over alpha0.

    Photon numbers scale as alpha0^2, so the modulator is applied once per
    setting and reused for every amplitude.
    """

    def __init__(self, params, losses, regime, beta, disp, energies=None):
        self.params = params
        self.losses = losses
        self.regime = regime
        self.beta = regime.resolve_beta(beta)
        self.disp = disp
        if energies is None:
            sb, car = relation_energies(params, [self.beta], disp, [0.0, math.pi])
            energies = (sb[0], car[0])
        self.sb_eq, self.sb_op = energies[0]
        self.c_eq, self.c_op = energies[1]

    def probs(self, alpha0, detector, relation):
        """(click probability, saturated) for one detector and phase relation."""
        sb = self.sb_eq if relation == "equal" else self.sb_op
        car = self.c_eq if relation == "equal" else self.c_op
        n_sig = detector_photons(self.params, self.losses, alpha0, sb, car, detector)
        weights = "sideband_detector" if detector == "sideband" else "carrier_detector"
        n_rs = rayleigh_photons(self.params, self.losses, alpha0, self.beta, weights)
        return _click(n_sig, n_rs, self.params)

    def qber_pb(self, alpha0):
        if self.regime is Regime.ORIGINAL:
            p_eq, s1 = self.probs(alpha0, "sideband", "equal")
            p_op, s2 = self.probs(alpha0, "sideband", "opposite")
            q, pb = _ratio_guard(p_op, p_eq + p_op)
            return q, pb, s1 | s2
        sb_eq, s1 = self.probs(alpha0, "sideband", "equal")
        c_eq, s2 = self.probs(alpha0, "carrier", "equal")
        sb_op, s3 = self.probs(alpha0, "sideband", "opposite")
        c_op, s4 = self.probs(alpha0, "carrier", "opposite")
        if self.regime is Regime.DEEP:
            p_err = sb_op * (1.0 - c_op) + c_eq * (1.0 - sb_eq)
            p_ok = sb_eq * (1.0 - c_eq) + c_op * (1.0 - sb_op)
            sat = s1 | s2 | s3 | s4
        else:
            # a lone carrier click reads as the opposite-phase bit
            p_err, p_ok = c_eq, c_op
            sat = s2 | s4
        q, pb = _ratio_guard(p_err, p_ok + p_err)
        return q, pb, sat

    def evaluate(self, alpha0):
        """Arrays (qber, p_b, chi, raw_rate, saturated); raw_rate is not clamped at 0."""
        alpha0 = np.asarray(alpha0, dtype=np.float64)
        q, pb, sat = self.qber_pb(alpha0)
        chi = holevo_bs_attack(alpha0, self.beta, self.losses.eta_a, self.losses.eta_f,
                               tap=self.params.eve_tap)
        raw = self.params.rep_rate * pb * (1.0 - self.params.f_ec * binary_entropy(q) - chi)
        return q, pb, np.asarray(chi), raw, sat


def qber_and_pb_original(params: SystemParams, losses: LossBudget, alpha0: float,
                         beta: float, disp: DispersionSettings) -> tuple[float, float]:
    q, pb, _ = _Evaluator(params, losses, Regime.ORIGINAL, beta, disp).qber_pb(alpha0)
    return float(q), float(pb)


def deep_detector_probs(params: SystemParams, losses: LossBudget, alpha0: float,
                        disp: DispersionSettings, relation: str) -> tuple[float, float]:
    """(P_Dsb, P_Dc) at beta_DM for Bob's phase equal or opposite to Alice's."""
    if relation not in ("equal", "opposite"):
        raise ValueError(f"relation must be 'equal' or 'opposite' (got {relation!r})")
    ev = _Evaluator(params, losses, Regime.DEEP, None, disp)
    return (float(ev.probs(alpha0, "sideband", relation)[0]),
            float(ev.probs(alpha0, "carrier", relation)[0]))


def qber_and_pb_deep(params: SystemParams, losses: LossBudget, alpha0: float,
                     disp: DispersionSettings) -> tuple[float, float]:
    q, pb, _ = _Evaluator(params, losses, Regime.DEEP, None, disp).qber_pb(alpha0)
    return float(q), float(pb)


def qber_and_pb_carrier_only(params: SystemParams, losses: LossBudget, alpha0: float,
                             disp: DispersionSettings) -> tuple[float, float]:
    q, pb, _ = _Evaluator(params, losses, Regime.DEEP_CARRIER, None, disp).qber_pb(alpha0)
    return float(q), float(pb)


def holevo_bs_attack(alpha0, beta: float, eta_a: float, eta_f: float, tap: str = "front"):
    """Eve's Holevo information (bits) under the collective beam-splitter attack.

    With ``tap="front"`` Eve holds the fraction 1 - eta_F of the light leaving
    Alice, so her two states in a basis overlap as
    exp(-|alpha0|^2 eta_A^2 (1 - eta_F) (1 - J_0(2 beta))). ``tap="weighted"``
    replaces (1 - eta_F) with eta_F (1 - eta_F).
    """
    if tap == "front":
        tapped = 1.0 - eta_f
    elif tap == "weighted":
        tapped = eta_f * (1.0 - eta_f)
    else:
        raise ValueError(f"tap must be 'front' or 'weighted' (got {tap!r})")
    a2 = np.asarray(alpha0, dtype=np.float64) ** 2
    mu = a2 * eta_a ** 2 * tapped * (1.0 - bessel_j(0, 2.0 * beta))
    return binary_entropy(0.5 * (1.0 - np.exp(-mu)))


def state_overlap(alpha0: float, beta: float, eta_a: float, eta_f: float,
                  phi1: float, phi2: float, M: int | None = None) -> complex:
    """Overlap <psi_E(phi1)|psi_E(phi2)> of Eve's tapped states, summed over |m| <= M."""
    if beta > 2.5:
        raise DomainError(f"state_overlap supports beta <= 2.5 (got {beta})")
    if M is None:
        M = sideband_cutoff(2.0 * beta)
    m = np.arange(-M, M + 1)
    j2 = symmetric_bessel(beta, M) ** 2
    s = np.sum(j2 * (1.0 - np.exp(1j * m * (phi1 - phi2))))
    return complex(np.exp(-abs(alpha0) ** 2 * eta_a ** 2 * (1.0 - eta_f) * s))


def mixture_eigenvalues(overlap: complex) -> tuple[float, float]:
    """Eigenvalues of an equal mixture of two pure states with the given overlap."""
    a = abs(overlap)
    return 0.5 * (1.0 + a), 0.5 * (1.0 - a)


def key_rate(params: SystemParams, losses: LossBudget, regime: Regime, alpha0: float,
             beta: float | None = None, disp: DispersionSettings | None = None) -> RatePoint:
    """Devetak-Winter lower bound on the secret key rate at one operating point."""
    regime = Regime(regime)
    disp = disp or DispersionSettings()
    ev = _Evaluator(params, losses, regime, beta, disp)
    q, pb, chi, raw, sat = ev.evaluate(alpha0)
    return RatePoint(
        distance_km=float(disp.distance_km),
        loss_db=losses.fiber_loss_db,
        alpha0=float(alpha0),
        beta=ev.beta,
        qber=float(q),
        p_b=float(pb),
        chi_bits=float(chi),
        key_rate_bps=max(0.0, float(raw)),
        saturated_flag=bool(sat),
    )


def key_rate_decoy(nu: float, p1: float, q1: float, p_alpha: float, q: float,
                   f_ec: float) -> float:
    """Asymptotic decoy-state (GLLP-type) key rate from single-photon yield and error."""
    for name, v in (("P1", p1), ("Q1", q1), ("P_alpha", p_alpha), ("Q", q)):
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"{name} must lie in [0, 1] (got {v})")
    if p1 > p_alpha:
        raise DomainError(f"P1 must not exceed P_alpha ({p1} > {p_alpha})")
    k = 0.5 * nu * (p1 * (1.0 - binary_entropy(q1)) - p_alpha * f_ec * binary_entropy(q))
    return max(0.0, k)
