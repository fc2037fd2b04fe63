"""Benchmark: compiled extension kernels vs the pure-Python fallback.

Runs the two hot kernels (gradient flow and quadratic-differential tracing)
on representative workloads with both backends in-process and reports the
wall time and speedup.  Usage: python benchmarks/bench_kernels.py [reps]
"""

import sys
import time

import numpy as np

from zetaflow._kernels import pure

try:
    from zetaflow._kernels import _speedups as compiled
except ImportError:
    compiled = None


def bench(fn, args, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    reps = int(sys.argv[1]) if len(sys.argv) > 1 else 3

    # workload 1: gradient flow on a perturbed A4 potential, 12 seeds
    dw = np.array([-1.0 + 0.13j, 0.22 - 0.14j, 0.0, 0.0, 1.0], dtype=complex)
    crit = np.roots(dw[::-1]).astype(complex)
    seeds = [1.5 * np.exp(2j * np.pi * k / 12) for k in range(12)]

    def flow_all(impl):
        for s in seeds:
            impl.flow_polynomial_1d(dw, 1.0 + 0j, s, crit, 1e-6, 12.0, 200.0,
                                    1e-12, 1e-13, 1e-4, 400000)

    # workload 2: trajectory tracing on the Argyres-Douglas differential
    pc = np.array([3j, -3.0, 0.0, 1.0], dtype=complex)
    tps = np.roots(pc[::-1]).astype(complex)
    import cmath

    def trace_all(impl):
        for k in range(12):
            th = 0.1 + 0.25 * k
            z0 = tps[0] + 1e-5 * cmath.exp(1j * th)
            s0 = cmath.sqrt(np.polyval(pc[::-1], z0))
            impl.trace_quadratic(pc, cmath.exp(1j * th), z0, s0, tps,
                                 1e-8, 25.0, 100.0, 1e-11, 1e-12, 1e-4,
                                 400000, False)

    rows = []
    for name, work in (("flow_polynomial_1d", flow_all),
                       ("trace_quadratic", trace_all)):
        t_pure = bench(work, (pure,), reps)
        if compiled is not None:
            t_comp = bench(work, (compiled,), reps)
            rows.append((name, t_pure, t_comp, t_pure / t_comp))
        else:
            rows.append((name, t_pure, None, None))

    print(f"{'kernel':24s} {'pure [s]':>10s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, tp, tc, sp in rows:
        if tc is None:
            print(f"{name:24s} {tp:10.4f} {'n/a':>13s} {'n/a':>8s}")
        else:
            print(f"{name:24s} {tp:10.4f} {tc:13.4f} {sp:7.1f}x")
    if compiled is None:
        print("compiled backend unavailable; build the extension to compare")


if __name__ == "__main__":
    main()
