#!/usr/bin/env python3
"""Time the compiled kernels against their plain-numpy twins.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --trials 20000000 --rows 100000

Each kernel pair is checked for identical output before timing, so this
doubles as a quick backend-parity smoke test.
"""

import argparse
import time

import numpy as np

from gmacpam import _kernels
from gmacpam.design import DesignInput, design_collinear
from gmacpam.geometry import priors_array
from gmacpam.simulate import _decoder_tables
from gmacpam.sources import from_marginals_correlation


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, min(times)


def bench_mc(trials, repeat):
    priors = from_marginals_correlation(0.1, 0.1, 0.9)
    sigma2 = 10.0**-0.8
    inp = DesignInput(priors, 1.0, 1.0, 1.0, sigma2)
    cc = design_collinear(inp).combined(inp)
    ax, ay, bias, cdf = _decoder_tables(cc, sigma2)
    args = (ax, ay, bias, cdf, sigma2, 20260815, 0, trials)

    rows = []
    ref, t_np = best_of(lambda: _kernels.mc_error_count_numpy(*args), repeat)
    rows.append(("monte-carlo", "numpy", t_np, trials / t_np))
    if _kernels.mc_error_count_numba is not None:
        _kernels.mc_error_count_numba(ax, ay, bias, cdf, sigma2, 1, 0, 1000)
        got, t_nb = best_of(lambda: _kernels.mc_error_count_numba(*args), repeat)
        assert got == ref, f"backend mismatch: {got} != {ref}"
        rows.append(("monte-carlo", "numba", t_nb, trials / t_nb))
    return rows


def bench_batch(rows_n, repeat):
    rng = np.random.default_rng(7)
    priors = priors_array(
        design_collinear(
            DesignInput(from_marginals_correlation(0.2, 0.5, 0.4), 1, 1, 1, 0.1)
        ).combined(
            DesignInput(from_marginals_correlation(0.2, 0.5, 0.4), 1, 1, 1, 0.1)
        )
    )
    pts = np.sort(rng.uniform(-3.0, 3.0, (rows_n, 4)), axis=1)
    pts += np.arange(4) * 0.05  # keep the sorted points apart

    out = []
    ref, t_np = best_of(
        lambda: _kernels.collinear_pe_batch_numpy(pts, priors, 0.04), repeat
    )
    out.append(("collinear-batch", "numpy", t_np, rows_n / t_np))
    if _kernels.collinear_pe_batch_numba is not None:
        _kernels.collinear_pe_batch_numba(pts[:64], priors, 0.04)
        got, t_nb = best_of(
            lambda: _kernels.collinear_pe_batch_numba(pts, priors, 0.04), repeat
        )
        assert np.allclose(got, ref, rtol=1e-12, atol=0.0)
        out.append(("collinear-batch", "numba", t_nb, rows_n / t_nb))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=5_000_000)
    ap.add_argument("--rows", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=3)
    ns = ap.parse_args()

    print(f"active backend: {_kernels.backend_name()}")
    rows = bench_mc(ns.trials, ns.repeat) + bench_batch(ns.rows, ns.repeat)

    print(f"{'kernel':<16} {'backend':<7} {'best time':>10} {'throughput':>14}")
    by_kernel = {}
    for kernel, backend, t, rate in rows:
        unit = "trials/s" if kernel == "monte-carlo" else "rows/s"
        print(f"{kernel:<16} {backend:<7} {t:>9.3f}s {rate:>10.3g} {unit}")
        by_kernel.setdefault(kernel, {})[backend] = t
    for kernel, t in by_kernel.items():
        if "numba" in t:
            print(f"{kernel}: numba is {t['numpy'] / t['numba']:.1f}x faster")


if __name__ == "__main__":
    main()
