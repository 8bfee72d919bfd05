"""Loop kernels compiled with numba."""

import math

import numpy as np
from numba import njit

from ._common import (POLICY_RANDOM_BIT, REGIME_CARRIER, REGIME_DEEP, REGIME_ORIGINAL,
                      RESCALE_AT, RESCALE_BY, SMALL_X, miller_start)


@njit(cache=True)
def _bessel_row(x, nmax, start, row):
    if x == 0.0:
        row[0] = 1.0
        for k in range(1, nmax + 1):
            row[k] = 0.0
        return
    if x < SMALL_X:
        h = 0.5 * x
        term = 1.0
        for k in range(nmax + 1):
            if k > 0:
                term *= h / k
            row[k] = term * (1.0 - h * h / (k + 1))
        return
    for k in range(nmax + 1):
        row[k] = 0.0
    j_hi = 0.0
    j_k = 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        j_lo = (2.0 * k / x) * j_k - j_hi
        j_hi = j_k
        j_k = j_lo
        if k - 1 <= nmax:
            row[k - 1] = j_k
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_k
        if abs(j_k) > RESCALE_AT:
            j_k *= RESCALE_BY
            j_hi *= RESCALE_BY
            norm *= RESCALE_BY
            for i in range(nmax + 1):
                row[i] *= RESCALE_BY
    norm += j_k
    for k in range(nmax + 1):
        row[k] /= norm


@njit(cache=True)
def _bessel_table(xs, nmax, start):
    out = np.empty((xs.size, nmax + 1))
    for i in range(xs.size):
        _bessel_row(xs[i], nmax, start, out[i])
    return out


def bessel_table(xs, nmax):
    xs = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    if xs.size == 0:
        return np.zeros((0, nmax + 1))
    return _bessel_table(xs, nmax, miller_start(nmax, xs.max()))


@njit(cache=True)
def _modulated_energies(amps, jrows, phis):
    nb, nmodes = amps.shape
    half = (nmodes - 1) // 2
    nphi = phis.size
    sideband = np.zeros((nb, nphi))
    carrier = np.zeros((nb, nphi))
    out = np.empty(nmodes, dtype=np.complex128)
    rot = np.empty(2 * nmodes - 1, dtype=np.complex128)
    for b in range(nb):
        for p in range(nphi):
            for lag in range(-(nmodes - 1), nmodes):
                rot[lag + nmodes - 1] = complex(math.cos(lag * phis[p]), math.sin(lag * phis[p]))
            for o in range(nmodes):
                acc = 0j
                for k in range(nmodes):
                    lag = o - k
                    if lag >= 0:
                        j = jrows[b, lag]
                    else:
                        j = jrows[b, -lag]
                        if (-lag) % 2 == 1:
                            j = -j
                    acc += j * rot[lag + nmodes - 1] * amps[b, k]
                out[o] = acc
            total = 0.0
            for o in range(nmodes):
                total += out[o].real ** 2 + out[o].imag ** 2
            c = out[half].real ** 2 + out[half].imag ** 2
            carrier[b, p] = c
            sideband[b, p] = total - c
    return sideband, carrier


def modulated_energies(amps, jrows, phis):
    return _modulated_energies(np.ascontiguousarray(amps, dtype=np.complex128),
                               np.ascontiguousarray(jrows, dtype=np.float64),
                               np.ascontiguousarray(phis, dtype=np.float64))


@njit(cache=True)
def _apply_dead_time(clicks, dead_pulses, blocked_until):
    kept = np.zeros_like(clicks)
    nxt = blocked_until
    for i in range(clicks.size):
        if clicks[i] and i >= nxt:
            kept[i] = True
            nxt = i + 1 + dead_pulses
    return kept, nxt - clicks.size


def apply_dead_time(clicks, dead_pulses, blocked_until):
    kept, carry = _apply_dead_time(clicks, dead_pulses, blocked_until)
    return kept, max(0, int(carry))


@njit(cache=True, nogil=True)
def _tally(regime, policy, basis_match, a_bit, b_bit, rand_bit, click_sb, click_c):
    matches = 0
    clicks = 0
    doubles = 0
    sifted = 0
    errors = 0
    for i in range(a_bit.size):
        if basis_match[i]:
            matches += 1
        if regime == REGIME_CARRIER:
            sb = False
            c = click_c[i]
        elif regime == REGIME_DEEP:
            sb = click_sb[i]
            c = click_c[i]
        else:
            sb = click_sb[i]
            c = False
        if not (sb or c):
            continue
        clicks += 1
        if sb and c:
            doubles += 1
        if not basis_match[i]:
            continue
        if regime == REGIME_ORIGINAL:
            bit = b_bit[i]
        elif sb and c:
            if policy != POLICY_RANDOM_BIT:
                continue
            bit = rand_bit[i]
        elif c:
            bit = 1
        else:
            bit = 0
        sifted += 1
        if bit != a_bit[i]:
            errors += 1
    return matches, clicks, doubles, sifted, errors



def tally(regime, policy, basis_match, a_bit, b_bit, rand_bit, click_sb, click_c):
    return tuple(int(v) for v in _tally(regime, policy, basis_match, a_bit, b_bit,
                                        rand_bit, click_sb, click_c))
