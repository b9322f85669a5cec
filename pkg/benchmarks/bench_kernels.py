"""Benchmark the compiled kernel core against the numpy fallback.

Times the two hot kernels in isolation and a full two-component split step
end to end (FFTs included) with each backend. Run from the repo root:

    python benchmarks/bench_kernels.py [--size 256] [--repeats 200]
"""

import argparse
import time

import numpy as np

import oinlsim.kernels as kernels
from oinlsim.kernels import available_backends


def _state(size, rng):
    psi_m = rng.standard_normal((size, size)) \
        + 1j * rng.standard_normal((size, size))
    psi_p = rng.standard_normal((size, size)) \
        + 1j * rng.standard_normal((size, size))
    v = 0.5 * rng.random((size, size))
    g_opt = -np.abs(rng.standard_normal((size, size)))
    return (np.ascontiguousarray(psi_m), np.ascontiguousarray(psi_p),
            np.ascontiguousarray(v), np.ascontiguousarray(g_opt))


def _time(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels(size, repeats):
    rng = np.random.default_rng(0)
    psi_m, psi_p, v, g_opt = _state(size, rng)
    factor = np.empty((size, size))
    rows = []
    for name, impl in available_backends().items():
        t_phase = _time(lambda: impl.local_phase_pair(
            psi_m, psi_p, v, v, 3.4e-3, 3.4e-3, None, g_opt, 1e-3), repeats)
        t_decay = _time(lambda: impl.local_decay(psi_m, v, 3.4e-3, 1e-3,
                                                 factor), repeats)
        rows.append((name, t_phase, t_decay))
    return rows


def bench_full_step(size, repeats):
    """One Strang step (two local halves + two FFT pairs) per backend."""
    from oinlsim.gpe_solver import (Couplings, PairPotentials,
                                    _step_pair_inplace)
    from oinlsim.grid_fields import make_grid

    rng = np.random.default_rng(1)
    psi_m, psi_p, v, g_opt = _state(size, rng)
    grid = make_grid(size, size, 24.0, 24.0)
    pots = PairPotentials(v, v)
    coup = Couplings(3.4e-3, 3.4e-3, g_opt_plus=g_opt)
    exp_k = np.exp(-0.5e-3j * grid.k2)

    rows = []
    saved = (kernels.local_phase_pair, kernels.local_decay)
    try:
        for name, impl in available_backends().items():
            kernels.local_phase_pair = impl.local_phase_pair
            kernels.local_decay = impl.local_decay
            rows.append((name, _time(lambda: _step_pair_inplace(
                psi_m, psi_p, grid, pots, coup, 1e-3, exp_k), repeats)))
    finally:
        kernels.local_phase_pair, kernels.local_decay = saved
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(backends)} "
          f"(active: {kernels.BACKEND}); grid {args.size}^2, "
          f"{args.repeats} repeats\n")

    kernel_rows = bench_kernels(args.size, args.repeats)
    print(f"{'backend':<10} {'local_phase_pair':>18} {'local_decay':>14}")
    for name, t_phase, t_decay in kernel_rows:
        print(f"{name:<10} {t_phase * 1e3:>15.3f} ms {t_decay * 1e3:>11.3f} ms")

    if len(kernel_rows) == 2:
        by_name = {name: (tp, td) for name, tp, td in kernel_rows}
        print(f"{'speedup':<10} "
              f"{by_name['python'][0] / by_name['compiled'][0]:>16.2f}x "
              f"{by_name['python'][1] / by_name['compiled'][1]:>12.2f}x")

    print()
    step_rows = bench_full_step(args.size, args.repeats)
    print(f"{'backend':<10} {'full Strang step':>18}")
    for name, t_step in step_rows:
        print(f"{name:<10} {t_step * 1e3:>15.3f} ms")
    if len(step_rows) == 2:
        by_name = dict(step_rows)
        print(f"{'speedup':<10} "
              f"{by_name['python'] / by_name['compiled']:>16.2f}x")


if __name__ == "__main__":
    main()
