"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_backends.py [--pulses N] [--repeat R]

JIT compilation is excluded by a warm-up call. The last row times a full
Monte-Carlo session with each backend routed through the package.
"""

import argparse
import math
import time

import numpy as np

from scwqkd import kernels
from scwqkd.kernels import _common
from scwqkd.params import DeviceLosses, DispersionSettings, SystemParams
from scwqkd.sim import SimConfig, simulate_session

FUNCS = ("bessel_table", "modulated_energies", "apply_dead_time", "tally")


def best_of(fn, repeat):
    fn()  # warm-up, includes compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n):
    rng = np.random.default_rng(0)
    xs = np.linspace(0.05, 4.8, 512)
    M = 24
    betas = np.linspace(0.05, 2.4, 64)
    jrows = kernels.load_backend("numpy").bessel_table(betas, 2 * M)
    m = np.arange(-M, M + 1)
    amps = jrows[:, np.abs(m)] * np.exp(1j * 1e-3 * m ** 2)[None, :]
    phis = np.array([0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi])
    clicks = rng.random(n) < 0.01
    tally_args = (rng.random(n) < 0.5, rng.integers(0, 2, n, dtype=np.uint8),
                  np.zeros(n, np.uint8), rng.integers(0, 2, n, dtype=np.uint8),
                  rng.random(n) < 0.01, rng.random(n) < 0.01)
    return {
        "bessel_table 512 x 65": lambda k: k.bessel_table(xs, 64),
        "modulated_energies 64 x 49 x 4": lambda k: k.modulated_energies(amps, jrows, phis),
        f"apply_dead_time n={n:.0e}": lambda k: k.apply_dead_time(clicks, 100, 0),
        f"tally n={n:.0e}": lambda k: k.tally(_common.REGIME_DEEP, _common.POLICY_DISCARD,
                                              *tally_args),
    }


def session(n):
    cfg = SimConfig(n_pulses=n, seed=1, regime="deep", params=SystemParams(),
                    losses=DeviceLosses().at(10.0), alpha0=1.5,
                    disp=DispersionSettings(10.0))
    return lambda: simulate_session(cfg)


def with_backend(name, fn):
    impl = kernels.load_backend(name)
    saved = {f: getattr(kernels, f) for f in FUNCS}
    for f in FUNCS:
        setattr(kernels, f, getattr(impl, f))
    try:
        return fn()
    finally:
        for f, v in saved.items():
            setattr(kernels, f, v)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pulses", type=int, default=1 << 20)
    ap.add_argument("--session-pulses", type=int, default=10 ** 7)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rows = []
    for label, call in cases(args.pulses).items():
        t = {b: best_of(lambda: call(kernels.load_backend(b)), args.repeat)
             for b in ("numpy", "numba")}
        rows.append((label, t["numpy"], t["numba"]))
    run = session(args.session_pulses)
    t = {b: with_backend(b, lambda: best_of(run, max(1, args.repeat // 2)))
         for b in ("numpy", "numba")}
    rows.append((f"simulate_session n={args.session_pulses:.0e}", t["numpy"], t["numba"]))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy [ms]':>11}  {'numba [ms]':>11}  {'speed-up':>8}")
    for label, tn, tb in rows:
        print(f"{label:<{width}}  {1e3 * tn:11.3f}  {1e3 * tb:11.3f}  {tn / tb:8.1f}x")


if __name__ == "__main__":
    main()
