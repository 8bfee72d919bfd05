import numpy as np
import pytest

from scwqkd.optimize import (NO_POSITIVE_RATE, OptimalPoint, OptimizeSpec, distance_grid,
                             golden_max, optimal_curve, optimize_point)
from scwqkd.params import DeviceLosses, SystemParams
from scwqkd.rates import Regime, key_rate


def test_golden_max_parabola():
    x, fx, n = golden_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0, 60)
    assert x == pytest.approx(0.3, abs=1e-9)
    assert n == 62


def test_golden_max_degenerate():
    assert golden_max(lambda t: t, 1.0, 1.0, 10) == (1.0, 1.0, 1)


@pytest.mark.parametrize("kw", [dict(alpha0_range=(2.0, 1.0)), dict(beta_range=(0.1, 5.0)),
                                dict(coarse_grid=4), dict(distance_km=-1.0),
                                dict(refine_iters=-1), dict(seedless=False)])
def test_spec_validation(kw):
    args = dict(regime="original", distance_km=10.0)
    args.update(kw)
    with pytest.raises(ValueError):
        OptimizeSpec(**args)


def test_grids():
    spec = OptimizeSpec("original", 0.0, coarse_grid=8)
    a = spec.alpha_grid()
    assert a[0] > 0 and a[-1] == 5.0 and a.size == 8
    assert spec.beta_grid().size == 8
    deep = OptimizeSpec("deep", 0.0, coarse_grid=8)
    assert deep.beta_grid().size == 1


def test_distance_grid():
    np.testing.assert_allclose(distance_grid(0, 10, 2.5), [0, 2.5, 5, 7.5, 10])
    np.testing.assert_allclose(distance_grid(0, 1, 0.1)[-1], 1.0)
    for bad in [(5, 5, 1), (5, 1, 1), (0, 5, 0), (-1, 5, 1)]:
        with pytest.raises(ValueError):
            distance_grid(*bad)


@pytest.mark.parametrize("regime", list(Regime))
def test_deterministic(params, device, regime):
    spec = OptimizeSpec(regime, 20.0)
    a = optimize_point(spec, params, device)
    b = optimize_point(spec, params, device)
    assert a == b


@pytest.mark.parametrize("regime,comp", [("original", False), ("original", True),
                                         ("deep", False), ("deep-carrier", False)])
def test_local_optimality_witness(params, device, regime, comp):
    spec = OptimizeSpec(regime, 15.0, compensate_dispersion=comp)
    opt = optimize_point(spec, params, device)
    a_step = spec.alpha_grid()[1] - spec.alpha_grid()[0]
    losses = device.at(15.0)
    best = opt.key_rate
    betas = [opt.opt_beta]
    if not spec.regime.is_deep:
        b_step = spec.beta_grid()[1] - spec.beta_grid()[0]
        betas += [opt.opt_beta - b_step, opt.opt_beta + b_step]
    for a in (opt.opt_alpha0 - a_step, opt.opt_alpha0, opt.opt_alpha0 + a_step):
        for b in betas:
            if not (0 < a <= 5.0 and 0.05 <= b <= 2.4):
                continue
            k = key_rate(params, losses, spec.regime, a, None if spec.regime.is_deep else b,
                         spec.dispersion).key_rate_bps
            assert k <= best * (1 + 1e-12)


def test_beyond_cutoff_reports_no_rate(params, device):
    opt = optimize_point(OptimizeSpec("deep", 80.0), params, device)
    assert opt.key_rate == 0.0
    assert opt.status == NO_POSITIVE_RATE


def test_warm_start_matches_cold(params, device):
    curve = optimal_curve(Regime.ORIGINAL, 0.0, 40.0, 10.0, params, device)
    for opt in curve:
        cold = optimize_point(OptimizeSpec("original", opt.point.distance_km), params, device)
        assert opt.key_rate == pytest.approx(cold.key_rate, rel=5e-3)


@pytest.mark.parametrize("regime", ["original", "deep"])
def test_compensated_curve_nonincreasing(params, device, regime):
    curve = optimal_curve(Regime(regime), 0.0, 60.0, 5.0, params, device,
                          compensate_dispersion=True)
    k = [o.key_rate for o in curve]
    assert [o.point.distance_km for o in curve] == sorted(o.point.distance_km for o in curve)
    for a, b in zip(k, k[1:]):
        assert b <= a * 1.01


def test_columns_and_record(params, device):
    opt = optimize_point(OptimizeSpec("deep", 10.0), params, device)
    row = opt.to_dict()
    assert list(row) == OptimalPoint.columns()
    assert OptimalPoint.columns()[-3:] == ["opt_alpha0", "opt_beta", "converged_steps"]
    assert row["opt_alpha0"] == row["alpha0"]
    assert opt.converged_steps > 0
