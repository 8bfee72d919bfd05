import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scwqkd.model import (DomainError, beta_deep_modulation, bessel_j, bessel_orders,
                          sideband_cutoff, symmetric_bessel)

J0_FIRST_ZERO = 2.404825557695773


def mp_j(n, x):
    mpmath.mp.dps = 40
    return float(mpmath.besselj(n, x))


def bisect_j0_zero(lo=2.0, hi=3.0):
    # independent of the package: mpmath series, plain bisection
    mpmath.mp.dps = 40
    f = lambda x: mpmath.besselj(0, x)
    a, b = mpmath.mpf(lo), mpmath.mpf(hi)
    for _ in range(200):
        m = (a + b) / 2
        if f(a) * f(m) <= 0:
            b = m
        else:
            a = m
    return float((a + b) / 2)


def test_trivial_values(backend):
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(7, 0.0) == 0.0


@pytest.mark.parametrize("x", [0.01, 0.38, 1.0, 2.4048, 2.7, 4.8, 7.5, 12.0, 16.0])
def test_matches_mpmath(backend, x):
    row = bessel_orders(x, 64)
    ref = np.array([mp_j(n, x) for n in range(65)])
    np.testing.assert_allclose(row, ref, rtol=0, atol=1e-15)


def test_first_zero_of_j0(backend):
    z = bisect_j0_zero()
    assert abs(z - J0_FIRST_ZERO) < 1e-12
    assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-10


def test_beta_dm(backend):
    b = beta_deep_modulation()
    assert b == pytest.approx(1.2, abs=0.01)
    assert abs(b - 1.202412778847887) < 1e-9
    assert abs(b - bisect_j0_zero() / 2) < 1e-12
    assert abs(bessel_j(0, 2 * b)) < 1e-10


def test_negative_orders():
    for n in range(1, 8):
        assert bessel_j(-n, 1.7) == pytest.approx((-1) ** n * bessel_j(n, 1.7), abs=0)
    s = symmetric_bessel(1.7, 5)
    assert s[5] == bessel_j(0, 1.7)
    assert s[0] == pytest.approx(-bessel_j(5, 1.7))


@pytest.mark.parametrize("order,x", [(65, 1.0), (0, -0.1), (0, 16.5), (1.5, 1.0)])
def test_domain(order, x):
    with pytest.raises(DomainError):
        bessel_j(order, x)


def test_cutoff_keeps_energy():
    for b in [0.1, 0.76, 2.4, 4.8]:
        M = sideband_cutoff(b)
        row = bessel_orders(b, M)
        assert row[0] ** 2 + 2 * np.sum(row[1:] ** 2) >= 1 - 1e-12
        assert M >= 10


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 16.0), st.integers(1, 40))
def test_three_term_recurrence(x, n):
    row = bessel_orders(x, 41)
    lhs = row[n - 1] + row[n + 1]
    assert lhs == pytest.approx(2 * n / x * row[n], abs=1e-13 * max(1.0, 2 * n / x))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 16.0))
def test_parseval(x):
    row = bessel_orders(x, 64)
    assert row[0] ** 2 + 2 * np.sum(row[1:] ** 2) == pytest.approx(1.0, abs=1e-13)
    assert abs(row).max() <= 1.0 + 1e-15
