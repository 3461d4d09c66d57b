#!/usr/bin/env python3
"""Benchmark the compiled kernels against their NumPy twins.

Runs the grid search and the detector simulation on representative
workloads with both backends and prints a timing table plus agreement
checks.  Usage:

    python benchmarks/bench_kernels.py [--quick]
"""
import argparse
import math
import sys
import time

import numpy as np

from wpcnrelay import Geometry, SystemParams, gains_from_geometry
from wpcnrelay import _kernels_py
from wpcnrelay.link import backscatter_ber, bsc_capacity
from wpcnrelay.rates import ConstantsRho

try:
    from wpcnrelay import _kernels
except ImportError:
    _kernels = None


def _grid_args(params, gains):
    c = ConstantsRho.from_params(params, gains)
    c_rb = bsc_capacity(backscatter_ber(params, gains)) * params.rb
    a1 = params.eta * params.p1 * gains.h2
    a2 = 0.5 * params.eta * params.beta * params.p1 * (
        2 * gains.h2 + params.mu**2 * gains.h1 * gains.h12
    )
    return c.rho12, c.rho13, c.rho2, a1, a2, c_rb


def bench_grid(quick):
    params = SystemParams()
    gains = gains_from_geometry(Geometry.collinear(9.0, 3.0), params)
    args = _grid_args(params, gains)
    delta = 0.04 if quick else 0.02
    max_steps = int(math.floor(params.block_budget / delta + 1e-9))
    rows = []
    for scheme_id, label in ((0, "full grid"), (1, "no-backscatter"), (2, "independent")):
        results = {}
        for name, mod in _backends():
            t0 = time.time()
            res = mod.grid_search(*args, delta, max_steps, scheme_id, 30)
            results[name] = (time.time() - t0, res)
        rows.append((label, results))
    _print_table("grid_search (delta=%g)" % delta, rows, lambda r: "%d pts" % r[3])


def bench_detector(quick):
    params = SystemParams()
    gains = gains_from_geometry(Geometry.collinear(9.0, 3.0), params)
    sigma_sq = (1 - params.beta) * params.n0 + params.ns
    a_c = math.sqrt((1 - params.beta) * params.p1 * gains.h2)
    a_r = math.sqrt((1 - params.beta) * params.p1) * params.mu * math.sqrt(
        gains.h1 * gains.h12
    )
    std = math.sqrt(sigma_sq / 2)
    nbits = 20_000 if quick else 100_000
    rows = []
    for nsamp in (10, 100, 1000):
        thr = nsamp * (sigma_sq + 0.5 * a_r * a_r)
        results = {}
        for name, mod in _backends():
            t0 = time.time()
            errors = 0
            for chunk in range(4):
                bg = np.random.PCG64(np.random.SeedSequence([1, chunk]))
                errors += mod.detector_chunk(bg, nbits // 4, nsamp, a_c, a_r, std, thr)
            results[name] = (time.time() - t0, errors)
        rows.append(("N=%d" % nsamp, results))
    _print_table("detector (%d bits)" % nbits, rows, lambda e: "%d errors" % e)


def _backends():
    yield "numpy", _kernels_py
    if _kernels is not None:
        yield "compiled", _kernels


def _print_table(title, rows, describe):
    print("\n== %s ==" % title)
    for label, results in rows:
        t_np, r_np = results["numpy"]
        line = "%-16s numpy %8.3fs" % (label, t_np)
        if "compiled" in results:
            t_c, r_c = results["compiled"]
            speedup = t_np / t_c if t_c > 0 else float("inf")
            agree = describe(r_np) == describe(r_c)
            line += "   compiled %8.3fs   speedup %5.2fx   agree=%s" % (
                t_c, speedup, agree)
        line += "   [%s]" % describe(r_np)
        print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    if _kernels is None:
        print("compiled kernels unavailable; timing the numpy backend only",
              file=sys.stderr)
    bench_grid(args.quick)
    bench_detector(args.quick)


if __name__ == "__main__":
    main()
