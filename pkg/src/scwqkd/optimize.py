"""Deterministic search for the key-rate-maximizing alpha0 (and beta)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import relation_energies
from .params import DeviceLosses, DispersionSettings, SystemParams
from .rates import Regime, RatePoint, _Evaluator, key_rate

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
NO_POSITIVE_RATE = "no positive rate"
MAX_ROUNDS = 6


@dataclass(frozen=True)
class OptimizeSpec:
    regime: Regime
    distance_km: float
    alpha0_range: tuple[float, float] = (0.0, 5.0)
    beta_range: tuple[float, float] = (0.05, 2.4)
    coarse_grid: int = 64
    refine_iters: int = 40
    compensate_dispersion: bool = False
    compensate_group_delay: bool = True
    seedless: bool = True

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        lo, hi = self.alpha0_range
        if not (0.0 <= lo < hi):
            raise ValueError(f"alpha0_range must satisfy 0 <= lo < hi (got {self.alpha0_range})")
        blo, bhi = self.beta_range
        if not (0.0 <= blo < bhi <= 4.0):
            raise ValueError(f"beta_range must satisfy 0 <= lo < hi <= 4 (got {self.beta_range})")
        if self.coarse_grid < 8:
            raise ValueError(f"coarse_grid must be >= 8 (got {self.coarse_grid})")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")
        if self.distance_km < 0:
            raise ValueError(f"distance_km must be >= 0 (got {self.distance_km})")
        if not self.seedless:
            raise ValueError("the optimizer is deterministic; seedless must be True")

    @property
    def dispersion(self) -> DispersionSettings:
        return DispersionSettings(self.distance_km, self.compensate_group_delay,
                                  self.compensate_dispersion)

    def alpha_grid(self) -> np.ndarray:
        lo, hi = self.alpha0_range
        if lo == 0.0:
            # open at zero: no light means no key
            return np.linspace(0.0, hi, self.coarse_grid + 1)[1:]
        return np.linspace(lo, hi, self.coarse_grid)

    def beta_grid(self) -> np.ndarray:
        if self.regime.is_deep:
            return np.array([self.regime.resolve_beta()])
        return np.linspace(*self.beta_range, self.coarse_grid)


@dataclass(frozen=True)
class OptimalPoint:
    point: RatePoint
    grid_cell: tuple[int, int]
    refine_steps: int
    improvements: tuple[float, ...] = field(default_factory=tuple)
    status: str = "ok"

    @property
    def opt_alpha0(self) -> float:
        return self.point.alpha0

    @property
    def opt_beta(self) -> float:
        return self.point.beta

    @property
    def converged_steps(self) -> int:
        return self.refine_steps

    @property
    def key_rate(self) -> float:
        return self.point.key_rate_bps

    @classmethod
    def columns(cls) -> list[str]:
        return RatePoint.columns() + ["opt_alpha0", "opt_beta", "converged_steps"]

    def to_dict(self) -> dict:
        d = self.point.to_dict()
        d.update(opt_alpha0=self.opt_alpha0, opt_beta=self.opt_beta,
                 converged_steps=self.converged_steps)
        return d


def golden_max(f, a, b, iters):
    """Golden-section search for a maximum of f on [a, b]; returns (x, f(x), evaluations)."""
    if b <= a or iters <= 0:
        return a, f(a), 1
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc, iters + 2
    return d, fd, iters + 2


class _Objective:
    """Unclamped key rate as a function of (alpha0, beta); caches one evaluator per beta."""

    def __init__(self, spec, params, losses):
        self.spec = spec
        self.params = params
        self.losses = losses
        self.disp = spec.dispersion
        self._cache = {}

    def evaluator(self, beta, energies=None):
        ev = self._cache.get(beta)
        if ev is None:
            ev = _Evaluator(self.params, self.losses, self.spec.regime, beta, self.disp, energies)
            self._cache[beta] = ev
        return ev

    def __call__(self, alpha0, beta):
        return float(self.evaluator(beta).evaluate(alpha0)[3])

    def grid(self, alphas, betas):
        """Unclamped rates, shape (len(alphas), len(betas))."""
        sb, car = relation_energies(self.params, betas, self.disp, [0.0, math.pi])
        out = np.empty((alphas.size, betas.size))
        for j, beta in enumerate(betas):
            ev = self.evaluator(float(beta), (sb[j], car[j]))
            out[:, j] = ev.evaluate(alphas)[3]
        return out


def optimize_point(spec: OptimizeSpec, params: SystemParams, device: DeviceLosses,
                   start: tuple[float, float] | None = None) -> OptimalPoint:
    """Maximize the key rate over alpha0 (and beta in the original regime).

    An exhaustive coarse grid picks the best cell (ties go to the smaller
    alpha0), then coordinate-wise golden-section searches refine it within one
    grid step on each side. ``start`` is an extra candidate, typically the
    optimum at a neighbouring distance.
    """
    losses = device.at(spec.distance_km, params.fiber_atten_db_per_km)
    obj = _Objective(spec, params, losses)
    alphas = spec.alpha_grid()
    betas = spec.beta_grid()
    rates = obj.grid(alphas, betas)
    # row-major argmax over (alpha, beta) returns the smallest alpha among ties
    i, j = np.unravel_index(int(np.argmax(rates)), rates.shape)
    best_a, best_b, best_f = float(alphas[i]), float(betas[j]), float(rates[i, j])

    if start is not None:
        sa = float(np.clip(start[0], alphas[0], alphas[-1]))
        sb = float(np.clip(start[1], betas[0], betas[-1])) if betas.size > 1 else best_b
        fs = obj(sa, sb)
        if fs > best_f:
            best_a, best_b, best_f = sa, sb, fs
            i = int(np.argmin(np.abs(alphas - sa)))
            j = int(np.argmin(np.abs(betas - sb)))

    a_step = alphas[1] - alphas[0]
    a_lo = max(spec.alpha0_range[0] or 1e-9, best_a - a_step)
    a_hi = min(spec.alpha0_range[1], best_a + a_step)
    if betas.size > 1:
        b_step = betas[1] - betas[0]
        b_lo = max(spec.beta_range[0], best_b - b_step)
        b_hi = min(spec.beta_range[1], best_b + b_step)

    steps = 0
    improvements = []
    for _ in range(MAX_ROUNDS):
        round_start = best_f
        x, fx, n = golden_max(lambda a: obj(a, best_b), a_lo, a_hi, spec.refine_iters)
        steps += n
        if fx > best_f:
            improvements.append(fx - best_f)
            best_a, best_f = x, fx
        if betas.size > 1:
            x, fx, n = golden_max(lambda b: obj(best_a, b), b_lo, b_hi, spec.refine_iters)
            steps += n
            if fx > best_f:
                improvements.append(fx - best_f)
                best_b, best_f = x, fx
        else:
            break
        if best_f - round_start <= 1e-12 * max(1.0, abs(best_f)):
            break

    point = key_rate(params, losses, spec.regime, best_a,
                     best_b if not spec.regime.is_deep else None, spec.dispersion)
    status = "ok" if point.key_rate_bps > 0.0 else NO_POSITIVE_RATE
    return OptimalPoint(point, (int(i), int(j)), steps, tuple(improvements), status)


def distance_grid(d_start: float, d_end: float, d_step: float) -> np.ndarray:
    if not (0.0 <= d_start < d_end) or not d_step > 0:
        raise ValueError(f"need 0 <= d_start < d_end and d_step > 0 "
                         f"(got {d_start}, {d_end}, {d_step})")
    n = int(math.floor((d_end - d_start) / d_step + 1e-9))
    return d_start + d_step * np.arange(n + 1)


def optimal_curve(regime: Regime, d_start: float, d_end: float, d_step: float,
                  params: SystemParams, device: DeviceLosses, **spec_kwargs) -> list[OptimalPoint]:
    """Optimal operating point at each distance, warm-started from the previous one."""
    out = []
    prev = None
    for d in distance_grid(d_start, d_end, d_step):
        spec = OptimizeSpec(regime=regime, distance_km=float(d), **spec_kwargs)
        opt = optimize_point(spec, params, device, start=prev)
        out.append(opt)
        prev = (opt.opt_alpha0, opt.opt_beta) if opt.status == "ok" else None
    return out
