"""Brute-force grid verifier for the solver.

Enumerates the time simplex on a regular grid, spends the full energy
budget (every rate is nondecreasing in its energy argument, so no optimum
is lost), and splits it by golden-section search on the inner objective,
which is the minimum of two concave one-dimensional functions and hence
unimodal.  Every grid point is feasible, so the grid value is a certified
lower bound on the optimum; the reported grid bound estimates the gap from
a companion run at twice the step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _backend
from .link import backscatter_ber, bsc_capacity
from .model import ChannelGains, EnergySplit, SystemParams, TimeAllocation
from .rates import ConstantsRho, Scheme, evaluate
from .solver import Solution, SolverOptions, recover_powers, solve

__all__ = ["grid_solve", "cross_validate", "CrossValidationReport"]

_SCHEME_ID = {Scheme.AB_COOP: 0, Scheme.ACTIVE_COOP: 1, Scheme.NO_COOP: 2}
_FREE_TIME_DIMS = {Scheme.AB_COOP: 5, Scheme.ACTIVE_COOP: 4, Scheme.NO_COOP: 3}
_GOLDEN_ITERS = 30
_BOUND_SAFETY = 1.5
_BOUND_FLOOR_SCALE = 0.6


def _grid_best(params, gains, scheme, delta):
    consts = ConstantsRho.from_params(params, gains)
    c_rb = bsc_capacity(backscatter_ber(params, gains)) * params.rb
    a1 = params.eta * params.p1 * gains.h2
    a2 = 0.5 * params.eta * params.beta * params.p1 * (
        2.0 * gains.h2 + params.mu ** 2 * gains.h1 * gains.h12
    )
    budget = params.block_budget
    max_steps = int(math.floor(budget / delta + 1e-9))
    best_val, steps, tau41, n_points = _backend.grid_search(
        consts.rho12, consts.rho13, consts.rho2, a1, a2, c_rb,
        delta, max_steps, _SCHEME_ID[scheme], _GOLDEN_ITERS,
    )
    return best_val, steps, tau41, n_points, consts, a1, a2, c_rb


def grid_solve(
    params: SystemParams,
    gains: ChannelGains,
    scheme: Scheme = Scheme.AB_COOP,
    delta: float = 0.02,
) -> Solution:
    """Best schedule on the delta-grid, with a gap estimate in diagnostics.

    Supported steps: 0.01 <= delta <= 0.1 (finer grids are out of scope).
    diagnostics carries grid_points, grid_bound (gap estimate vs the true
    optimum) and the companion coarse-grid value.
    """
    if not 0.01 <= delta <= 0.1:
        raise ValueError("delta must be in [0.01, 0.1], got %r" % (delta,))
    best_val, steps, tau41, n_points, consts, a1, a2, c_rb = _grid_best(
        params, gains, scheme, delta
    )
    coarse_val, _, _, _, _, _, _, _ = _grid_best(params, gains, scheme, 2.0 * delta)
    # gap estimate: two-grid Richardson difference, floored by a scaled form
    # of the rigorous scale-invariance bound V*k*delta/(B - k*delta), where
    # k is the number of free time coordinates (values are homogeneous of
    # degree one in the schedule, so rounding the scaled optimizer up to the
    # grid loses at most that fraction)
    k = _FREE_TIME_DIMS[scheme]
    budget = params.block_budget
    floor = 0.0
    if budget > k * delta:
        floor = _BOUND_FLOOR_SCALE * best_val * k * delta / (budget - k * delta)
    bound = (
        max(_BOUND_SAFETY * max(best_val - coarse_val, 0.0), floor)
        + 1e-6 * best_val
        + 1e-15
    )

    t = tuple(s * delta for s in steps)
    alloc = TimeAllocation(t1=t[0], t2=t[1], t3=t[2], t41=t[3], t42=t[4])
    e = a1 * t[0] + a2 * t[1]
    tau41 = min(max(tau41, 0.0), e)
    split = EnergySplit(tau41=tau41, tau42=max(e - tau41, 0.0))
    report = evaluate(params, gains, alloc, split, scheme)
    powers = recover_powers(alloc, split, params, gains)
    return Solution(
        scheme=scheme,
        alloc=alloc,
        split=split,
        powers=powers,
        report=report,
        status="optimal",
        diagnostics={
            "grid_points": n_points,
            "grid_bound": bound,
            "delta": delta,
            "coarse_value": coarse_val,
            "kernel_value": best_val,
        },
    )


@dataclass(frozen=True)
class CrossValidationReport:
    """Per-scheme comparison of the solver against the grid oracle."""

    entries: tuple  # ((scheme, v_solver, v_grid, tolerance, ok), ...)

    @property
    def ok(self) -> bool:
        return all(e[4] for e in self.entries)


def cross_validate(
    params: SystemParams,
    gains: ChannelGains,
    opts: SolverOptions | None = None,
    delta: float = 0.02,
    rel_tol: float = 0.02,
) -> CrossValidationReport:
    """Solve and grid-search every scheme; flag disagreements.

    A scheme passes when |v_solver - v_grid| <= max(rel_tol * v_grid,
    grid bound).
    """
    entries = []
    for scheme in Scheme:
        sol = solve(params, gains, scheme, opts)
        grid = grid_solve(params, gains, scheme, delta)
        tolerance = max(rel_tol * grid.objective, grid.diagnostics["grid_bound"])
        ok = abs(sol.objective - grid.objective) <= tolerance
        entries.append((scheme, sol.objective, grid.objective, tolerance, ok))
    return CrossValidationReport(entries=tuple(entries))
