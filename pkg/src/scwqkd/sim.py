"""Seeded pulse-level Monte-Carlo of a BB84 subcarrier-wave session."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .model import (RELATION_OFFSETS, detector_photons, rayleigh_photons,
                    relation_energies)
from .params import DispersionSettings, LossBudget, SystemParams
from .rates import Regime, RatePoint, _click, key_rate

RNG_ALGORITHM = "numpy PCG64, block b seeded by SeedSequence(seed, spawn_key=(b,))"
BLOCK_SIZE = 1 << 20
MAX_PULSES = 10 ** 9
Z_THRESHOLD = 3.0

_REGIME_CODE = {
    Regime.ORIGINAL: kernels.REGIME_ORIGINAL,
    Regime.DEEP: kernels.REGIME_DEEP,
    Regime.DEEP_CARRIER: kernels.REGIME_CARRIER,
}
_POLICY_CODE = {"discard": kernels.POLICY_DISCARD, "random_bit": kernels.POLICY_RANDOM_BIT}
# Bob's phase minus Alice's phase, in quarter turns
_OFFSETS = [RELATION_OFFSETS[k] for k in ("equal", "quadrature", "opposite", "anti-quadrature")]


@dataclass(frozen=True)
class SimConfig:
    n_pulses: int
    seed: int
    regime: Regime
    params: SystemParams
    losses: LossBudget
    alpha0: float
    beta: float | None = None
    disp: DispersionSettings = field(default_factory=DispersionSettings)
    double_click_policy: str = "discard"
    dead_time: float = 0.0
    block_size: int = BLOCK_SIZE
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not (1 <= self.n_pulses <= MAX_PULSES):
            raise ValueError(f"n_pulses must lie in [1, {MAX_PULSES}] (got {self.n_pulses})")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError(f"seed must be a 64-bit unsigned integer (got {self.seed})")
        if self.double_click_policy not in _POLICY_CODE:
            raise ValueError(f"double_click_policy must be one of {sorted(_POLICY_CODE)}")
        if self.alpha0 < 0:
            raise ValueError(f"alpha0 must be >= 0 (got {self.alpha0})")
        if self.dead_time < 0 or self.block_size < 1 or self.workers < 1:
            raise ValueError("dead_time >= 0, block_size >= 1 and workers >= 1 required")

    @property
    def beta_used(self) -> float:
        return self.regime.resolve_beta(self.beta)

    @property
    def dead_pulses(self) -> int:
        return int(math.ceil(self.dead_time / self.params.period)) if self.dead_time > 0 else 0


@dataclass(frozen=True)
class SimSummary:
    pulses: int
    basis_matches: int
    clicks: int
    double_clicks: int
    sifted_bits: int
    errors: int
    empirical_qber: float
    empirical_pb: float
    empirical_sifted_rate: float
    metadata: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def click_table(config: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-relation click probabilities (sideband detector, carrier detector).

    Index k is Bob's phase minus Alice's phase in quarter turns.
    """
    beta = config.beta_used
    sb, car = relation_energies(config.params, [beta], config.disp, _OFFSETS)
    out = []
    for det, weights in (("sideband", "sideband_detector"), ("carrier", "carrier_detector")):
        n_sig = detector_photons(config.params, config.losses, config.alpha0, sb[0], car[0], det)
        n_rs = rayleigh_photons(config.params, config.losses, config.alpha0, beta, weights)
        out.append(_click(n_sig, n_rs, config.params)[0])
    return out[0], out[1]


def _block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _draw_block(config, block, n, p_sb, p_c):
    rng = _block_stream(config.seed, block)
    a_basis = rng.integers(0, 2, n, dtype=np.uint8)
    a_bit = rng.integers(0, 2, n, dtype=np.uint8)
    b_basis = rng.integers(0, 2, n, dtype=np.uint8)
    b_bit = rng.integers(0, 2, n, dtype=np.uint8)
    u_sb = rng.random(n)
    u_c = rng.random(n)
    rand_bit = rng.integers(0, 2, n, dtype=np.uint8)
    if config.regime.is_deep:
        # Bob only picks a basis: phase 0 or pi/2
        b_bit = np.zeros_like(b_bit)
    rel = (b_basis.astype(np.int8) + 2 * b_bit - a_basis - 2 * a_bit) % 4
    click_sb = u_sb < p_sb[rel]
    click_c = u_c < p_c[rel]
    return a_basis == b_basis, a_bit, b_bit, rand_bit, click_sb, click_c


def _run_block(config, block, n, p_sb, p_c, regime_code, policy_code, carry=None):
    match, a_bit, b_bit, rand_bit, click_sb, click_c = _draw_block(config, block, n, p_sb, p_c)
    if carry is not None:
        click_sb, carry[0] = kernels.apply_dead_time(click_sb, config.dead_pulses, carry[0])
        click_c, carry[1] = kernels.apply_dead_time(click_c, config.dead_pulses, carry[1])
    return kernels.tally(regime_code, policy_code, match, a_bit, b_bit, rand_bit,
                         click_sb, click_c)


def simulate_session(config: SimConfig) -> SimSummary:
    """Draw every pulse, detect, sift and count errors.

    Pulses are split into fixed-size blocks with one RNG stream each, so the
    result depends only on (seed, block_size), not on ``workers``. Dead time
    couples neighbouring blocks, so it forces sequential evaluation.
    """
    p_sb, p_c = click_table(config)
    regime_code = _REGIME_CODE[config.regime]
    policy_code = _POLICY_CODE[config.double_click_policy]
    nblocks = -(-config.n_pulses // config.block_size)
    sizes = [min(config.block_size, config.n_pulses - b * config.block_size) for b in range(nblocks)]

    if config.dead_pulses:
        carry = [0, 0]
        parts = [_run_block(config, b, n, p_sb, p_c, regime_code, policy_code, carry)
                 for b, n in enumerate(sizes)]
    elif config.workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            parts = list(pool.map(
                lambda bn: _run_block(config, bn[0], bn[1], p_sb, p_c, regime_code, policy_code),
                enumerate(sizes)))
    else:
        parts = [_run_block(config, b, n, p_sb, p_c, regime_code, policy_code)
                 for b, n in enumerate(sizes)]

    matches, clicks, doubles, sifted, errors = (int(v) for v in np.sum(parts, axis=0))
    meta = {
        "rng": RNG_ALGORITHM,
        "seed": config.seed,
        "block_size": config.block_size,
        "backend": kernels.BACKEND,
        "regime": config.regime.value,
        "double_click_policy": config.double_click_policy,
        "dead_pulses": config.dead_pulses,
    }
    return SimSummary(
        pulses=config.n_pulses,
        basis_matches=matches,
        clicks=clicks,
        double_clicks=doubles,
        sifted_bits=sifted,
        errors=errors,
        empirical_qber=errors / sifted if sifted else 0.0,
        # sifted detections per basis-matched pulse estimate the analytic P_B
        empirical_pb=sifted / matches if matches else 0.0,
        empirical_sifted_rate=sifted / config.n_pulses * config.params.rep_rate,
        metadata=meta,
    )


def analytic_point(config: SimConfig) -> RatePoint:
    return key_rate(config.params, config.losses, config.regime, config.alpha0,
                    config.beta, config.disp)


def _z(observed, expected, sigma):
    if sigma > 0:
        return (observed - expected) / sigma
    return 0.0 if observed == expected else math.inf


def compare_to_analytic(summary: SimSummary, point: RatePoint,
                        threshold: float = Z_THRESHOLD) -> dict:
    """z-scores of empirical QBER and P_B against the analytic point."""
    report = {
        "threshold": threshold,
        "analytic_qber": point.qber,
        "analytic_pb": point.p_b,
        "empirical_qber": summary.empirical_qber,
        "empirical_pb": summary.empirical_pb,
        "z_qber": None,
        "z_pb": None,
    }
    if summary.pulses == 0 or summary.basis_matches == 0 or summary.sifted_bits == 0:
        report.update(status="insufficient samples", passed=False)
        return report
    q, pb = point.qber, point.p_b
    z_q = _z(summary.empirical_qber, q, math.sqrt(q * (1.0 - q) / summary.sifted_bits))
    z_pb = _z(summary.empirical_pb, pb, math.sqrt(pb * (1.0 - pb) / summary.basis_matches))
    passed = abs(z_q) <= threshold and abs(z_pb) <= threshold
    report.update(z_qber=z_q, z_pb=z_pb, passed=passed, status="pass" if passed else "fail")
    return report
