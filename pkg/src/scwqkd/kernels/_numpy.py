"""Vectorized numpy kernels (fallback backend)."""

import numpy as np

from ._common import (POLICY_RANDOM_BIT, REGIME_CARRIER, REGIME_DEEP,
                      RESCALE_AT, RESCALE_BY, SMALL_X, miller_start)


def bessel_table(xs, nmax):
    """J_0..J_nmax at each x in ``xs``; returns shape (len(xs), nmax + 1)."""
    xs = np.asarray(xs, dtype=np.float64)
    out = np.zeros((xs.size, nmax + 1))
    zero = xs == 0.0
    out[zero, 0] = 1.0
    small = ~zero & (xs < SMALL_X)
    if small.any():
        h = 0.5 * xs[small][:, None]
        k = np.arange(nmax + 1)
        ratios = np.concatenate((np.ones_like(h), h / k[1:]), axis=1)
        with np.errstate(under="ignore"):
            lead = np.cumprod(ratios, axis=1)
        out[small] = lead * (1.0 - h * h / (k + 1))
    live = ~zero & ~small
    if not live.any():
        return out
    x = xs[live]
    start = miller_start(nmax, x.max())
    tab = np.zeros((x.size, nmax + 1))
    j_hi = np.zeros_like(x)
    j_k = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    for k in range(start, 0, -1):
        j_lo = (2.0 * k / x) * j_k - j_hi
        j_hi, j_k = j_k, j_lo
        # j_k now holds J_{k-1}
        if k - 1 <= nmax:
            tab[:, k - 1] = j_k
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_k
        big = np.abs(j_k) > RESCALE_AT
        if big.any():
            j_k[big] *= RESCALE_BY
            j_hi[big] *= RESCALE_BY
            norm[big] *= RESCALE_BY
            tab[big] *= RESCALE_BY
    norm += j_k
    out[live] = tab / norm[:, None]
    return out


def modulated_energies(amps, jrows, phis):
    """Sideband and carrier energies after a sinusoidal phase modulator.

    amps:  (nb, 2M+1) complex input amplitudes on modes -M..M
    jrows: (nb, 2M+1) Bessel values J_0..J_2M of each row's depth
    phis:  (np,) modulator phases
    Returns (sideband, carrier), each (nb, np).
    """
    amps = np.asarray(amps, dtype=np.complex128)
    jrows = np.asarray(jrows, dtype=np.float64)
    phis = np.asarray(phis, dtype=np.float64)
    nmodes = amps.shape[1]
    half = (nmodes - 1) // 2
    orders = np.arange(-2 * half, 2 * half + 1)
    sign = np.where(orders < 0, (-1.0) ** np.abs(orders), 1.0)
    jfull = jrows[:, np.abs(orders)] * sign                     # (nb, 4M+1)
    lag = np.arange(nmodes)[:, None] - np.arange(nmodes)[None, :]  # out - in
    phase = np.exp(1j * phis[:, None, None] * lag[None])          # (np, n, n)
    umat = jfull[:, None, lag + 2 * half] * phase[None]           # (nb, np, n, n)
    out = np.einsum("bpok,bk->bpo", umat, amps)
    power = np.abs(out) ** 2
    carrier = power[:, :, half]
    sideband = power.sum(axis=2) - carrier
    return sideband, carrier


def apply_dead_time(clicks, dead_pulses, blocked_until):
    """Drop clicks inside a detector's dead window.

    ``blocked_until`` is the first pulse index (relative to this block) at
    which the detector is live again; returns (kept clicks, carry for the
    next block).
    """
    kept = np.zeros_like(clicks)
    nxt = blocked_until
    for idx in np.flatnonzero(clicks):
        if idx >= nxt:
            kept[idx] = True
            nxt = idx + 1 + dead_pulses
    return kept, max(0, int(nxt - clicks.size))


def tally(regime, policy, basis_match, a_bit, b_bit, rand_bit, click_sb, click_c):
    """Return (basis_matches, clicks, double_clicks, sifted, errors)."""
    if regime == REGIME_CARRIER:
        any_click = click_c
        double = np.zeros_like(click_c)
        bob_bit = np.ones_like(a_bit)
        conclusive = click_c
    elif regime == REGIME_DEEP:
        any_click = click_sb | click_c
        double = click_sb & click_c
        bob_bit = np.where(click_c, 1, 0).astype(a_bit.dtype)
        if policy == POLICY_RANDOM_BIT:
            bob_bit = np.where(double, rand_bit, bob_bit)
            conclusive = any_click
        else:
            conclusive = any_click & ~double
    else:
        any_click = click_sb
        double = np.zeros_like(click_sb)
        bob_bit = b_bit
        conclusive = click_sb
    sifted = conclusive & basis_match
    errors = sifted & (bob_bit != a_bit)
    return (int(basis_match.sum()), int(any_click.sum()), int(double.sum()),
            int(sifted.sum()), int(errors.sum()))
