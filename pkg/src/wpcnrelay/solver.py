"""Max-min throughput solver.

The program is the epigraph form of the max-min problem: maximize rbar
subject to the block-time budget, WD2's energy budget, and rbar below each
composed rate.  All rates are concave perspective functions, so for a fixed
rbar feasibility is a convex question.  The solver runs a bisection on rbar;
each query is answered by a phase-1 problem (minimize the maximum constraint
violation s) solved with a log-barrier Newton method using analytic first
and second derivatives.  The bisection bracket certifies the result: the
returned level is feasible and the bracket top is infeasible.

Restricted schemes are handled by eliminating their pinned variables, which
keeps every query strictly feasible in the remaining coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .link import backscatter_ber, bsc_capacity
from .model import (
    ChannelGains,
    EnergySplit,
    PowerAllocation,
    SystemParams,
    TimeAllocation,
    active_power_p3,
)
from .rates import ConstantsRho, RateReport, Scheme, evaluate

__all__ = [
    "SolverOptions",
    "Solution",
    "objective_upper_bound",
    "solve",
    "recover_powers",
    "solve_all_schemes",
]

_LN2 = math.log(2.0)
_VAR_FLOOR = 1e-12          # variables stay above this inside the barrier
_BARRIER_MU_FINAL = 1e-11   # last barrier stage weight
_MAX_BISECT = 90


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and barrier schedule of the solver."""

    bisect_tol: float = 1e-6      # relative bracket width on rbar
    feas_tol: float = 1e-9        # max accepted constraint violation
    barrier_mu0: float = 1.0      # initial barrier weight
    barrier_shrink: float = 0.1   # per-stage barrier reduction factor
    newton_max_iter: int = 200    # Newton iterations per barrier stage

    def __post_init__(self):
        if not self.bisect_tol > 0:
            raise ValueError("bisect_tol must be > 0")
        if not self.feas_tol > 0:
            raise ValueError("feas_tol must be > 0")
        if not self.barrier_mu0 > 0:
            raise ValueError("barrier_mu0 must be > 0")
        if not 0 < self.barrier_shrink < 1:
            raise ValueError("barrier_shrink must be in (0, 1)")
        if not self.newton_max_iter >= 1:
            raise ValueError("newton_max_iter must be >= 1")


@dataclass(frozen=True)
class Solution:
    """One scheme's optimized schedule plus solver diagnostics."""

    scheme: Scheme
    alloc: TimeAllocation
    split: EnergySplit
    powers: PowerAllocation
    report: RateReport
    status: str                  # optimal | degenerate | infeasible
    diagnostics: dict

    @property
    def objective(self) -> float:
        return self.report.objective


# ---------------------------------------------------------------------------
# scheme-restricted problem description

_SCHEME_VARS = {
    Scheme.AB_COOP: ("t1", "t2", "t3", "t41", "t42", "tau41", "tau42"),
    Scheme.ACTIVE_COOP: ("t1", "t3", "t41", "t42", "tau41", "tau42"),
    Scheme.NO_COOP: ("t1", "t3", "t42", "tau42"),
}


class _Problem:
    """Constraint values/gradients/Hessians of one scheme in reduced vars."""

    def __init__(self, params: SystemParams, gains: ChannelGains, scheme: Scheme):
        self.params = params
        self.gains = gains
        self.scheme = scheme
        self.names = _SCHEME_VARS[scheme]
        self.idx = {n: i for i, n in enumerate(self.names)}
        self.n = len(self.names)
        self.budget = params.block_budget
        self.consts = ConstantsRho.from_params(params, gains)
        self.a1 = params.eta * params.p1 * gains.h2
        self.a2 = 0.5 * params.eta * params.beta * params.p1 * (
            2.0 * gains.h2 + params.mu ** 2 * gains.h1 * gains.h12
        )
        self.c_rb = bsc_capacity(backscatter_ber(params, gains)) * params.rb
        self.time_vars = [n for n in self.names if n.startswith("t") and not n.startswith("tau")]
        # perspective terms of each rate constraint: (time var, x var, rho)
        r12 = ("t3", "t1", self.consts.rho12)
        r13 = ("t3", "t1", self.consts.rho13)
        r14 = ("t41", "tau41", self.consts.rho2)
        r2 = ("t42", "tau42", self.consts.rho2)
        if scheme is Scheme.AB_COOP:
            self.rate_rows = [
                ([r12], self.c_rb, "t2"),   # rbar <= c_rb*t2 + R12
                ([r13, r14], 0.0, None),    # rbar <= R13 + R14
                ([r2], 0.0, None),          # rbar <= R2
            ]
        elif scheme is Scheme.ACTIVE_COOP:
            self.rate_rows = [
                ([r12], 0.0, None),
                ([r13, r14], 0.0, None),
                ([r2], 0.0, None),
            ]
        else:
            self.rate_rows = [
                ([r13], 0.0, None),
                ([r2], 0.0, None),
            ]
        self.n_constraints = 2 + len(self.rate_rows)

    # -- perspective term with derivatives --------------------------------

    @staticmethod
    def _persp(t: float, x: float, rho: float):
        """Value, gradient (d/dt, d/dx) and Hessian factor of t*log2(1+rho*x/t)."""
        if rho <= 0.0 or x <= 0.0 or t <= 0.0:
            # only reached at exact zeros, which the barrier never visits
            return 0.0, 0.0, 0.0, (0.0, 0.0, 0.0)
        u = rho * x / t
        lg = math.log1p(u) if u < 1e15 else math.log(u)
        val = t * lg / _LN2
        gt = (lg - u / (1.0 + u)) / _LN2
        gx = rho / ((1.0 + u) * _LN2)
        # Hessian = -1/(ln2 * t * (1+u)^2) * [[u^2, -rho*u], [-rho*u, rho^2]]
        c = 1.0 / (_LN2 * t * (1.0 + u) ** 2)
        htt = -c * u * u
        htx = c * rho * u
        hxx = -c * rho * rho
        return val, gt, gx, (htt, htx, hxx)

    def constraints(self, x: np.ndarray, rbar: float):
        """Values, gradients and Hessians of all c_i(x) <= 0 constraints."""
        idx = self.idx
        n = self.n
        vals = np.empty(self.n_constraints)
        grads = np.zeros((self.n_constraints, n))
        hessians = [None] * self.n_constraints

        # time budget
        tsum = sum(x[idx[v]] for v in self.time_vars)
        vals[0] = self.params.t0 + tsum - 1.0
        for v in self.time_vars:
            grads[0, idx[v]] = 1.0

        # energy budget: tau41 + tau42 <= a1*t1 + a2*t2
        e = self.a1 * x[idx["t1"]]
        grads[1, idx["t1"]] = -self.a1
        if "t2" in idx:
            e += self.a2 * x[idx["t2"]]
            grads[1, idx["t2"]] = -self.a2
        tau_sum = 0.0
        for v in ("tau41", "tau42"):
            if v in idx:
                tau_sum += x[idx[v]]
                grads[1, idx[v]] = 1.0
        vals[1] = tau_sum - e

        # rate constraints: rbar - (linear term) - sum of perspective terms
        for k, (terms, lin_coef, lin_var) in enumerate(self.rate_rows):
            row = 2 + k
            val = rbar
            if lin_var is not None:
                val -= lin_coef * x[idx[lin_var]]
                grads[row, idx[lin_var]] = -lin_coef
            hess = np.zeros((n, n))
            for tvar, xvar, rho in terms:
                it, ix = idx[tvar], idx[xvar]
                v, gt, gx, (htt, htx, hxx) = self._persp(x[it], x[ix], rho)
                val -= v
                grads[row, it] -= gt
                grads[row, ix] -= gx
                hess[it, it] -= htt
                hess[it, ix] -= htx
                hess[ix, it] -= htx
                hess[ix, ix] -= hxx
            vals[row] = val
            hessians[row] = hess
        return vals, grads, hessians

    def violation(self, x: np.ndarray, rbar: float) -> float:
        vals, _, _ = self.constraints(x, rbar)
        return float(np.max(vals))

    def start_point(self) -> np.ndarray:
        x0 = np.empty(self.n)
        share = self.budget / (2.0 * len(self.time_vars))
        for v in self.time_vars:
            x0[self.idx[v]] = share
        e0 = self.a1 * x0[self.idx["t1"]]
        if "t2" in self.idx:
            e0 += self.a2 * x0[self.idx["t2"]]
        n_tau = sum(1 for v in ("tau41", "tau42") if v in self.idx)
        for v in ("tau41", "tau42"):
            if v in self.idx:
                x0[self.idx[v]] = max(0.5 * e0 / n_tau, 2.0 * _VAR_FLOOR)
        return x0


# ---------------------------------------------------------------------------
# phase-1 barrier solve

def _phase1(problem: _Problem, rbar: float, opts: SolverOptions, full: bool):
    """Minimize the maximum constraint violation s at the level rbar.

    Returns (feasible, x, violation, newton_iters).  With full=False the
    search stops as soon as a strictly feasible point appears; with
    full=True the barrier schedule runs to the end, pushing the iterate
    toward the maximum-margin analytic center.
    """
    n = problem.n
    x = problem.start_point()
    vals, _, _ = problem.constraints(x, rbar)
    s = float(np.max(vals)) + 1.0
    z = np.concatenate([x, [s]])
    mu = opts.barrier_mu0
    iters_total = 0
    best_x = x.copy()
    best_v = float(np.max(vals))

    def barrier_value(z):
        x, s = z[:n], z[n]
        vals, _, _ = problem.constraints(x, rbar)
        d = s - vals
        slack = x - _VAR_FLOOR
        if np.any(d <= 0.0) or np.any(slack <= 0.0):
            return np.inf
        return s + mu * (-np.sum(np.log(d)) - np.sum(np.log(slack)))

    while True:
        for _ in range(opts.newton_max_iter):
            iters_total += 1
            x, s = z[:n], z[n]
            vals, grads, hessians = problem.constraints(x, rbar)
            v_now = float(np.max(vals))
            if v_now < best_v:
                best_v = v_now
                best_x = x.copy()
            if not full and v_now < 0.0:
                return True, x.copy(), v_now, iters_total
            d = s - vals
            slack = x - _VAR_FLOOR
            # gradient and Hessian of s + mu * barrier
            g = np.zeros(n + 1)
            g[n] = 1.0
            H = np.zeros((n + 1, n + 1))
            for i in range(problem.n_constraints):
                gi = np.concatenate([grads[i], [-1.0]])
                g += mu * gi / d[i]
                H += mu * np.outer(gi, gi) / d[i] ** 2
                if hessians[i] is not None:
                    H[:n, :n] += mu * hessians[i] / d[i]
            g[:n] -= mu / slack
            H[np.arange(n), np.arange(n)] += mu / slack ** 2
            try:
                np.linalg.cholesky(H)  # PD check; fall back to jitter if it fails
                step = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                H[np.arange(n + 1), np.arange(n + 1)] += 1e-10 * (1.0 + np.trace(H) / (n + 1))
                step = -np.linalg.solve(H, g)
            decrement_sq = float(-g @ step)
            if decrement_sq <= 1e-13:
                break
            # backtracking line search, keeping the iterate strictly interior
            f0 = barrier_value(z)
            alpha = 1.0
            gdotstep = float(g @ step)
            accepted = False
            for _ in range(80):
                cand = z + alpha * step
                f1 = barrier_value(cand)
                if f1 <= f0 + 0.25 * alpha * gdotstep:
                    z = cand
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                break
        if mu <= _BARRIER_MU_FINAL * 1.0000001:
            break
        mu = max(mu * opts.barrier_shrink, _BARRIER_MU_FINAL)

    x = z[:n]
    v_final = problem.violation(x, rbar)
    if v_final < best_v:
        best_v = v_final
        best_x = x.copy()
    return best_v < 0.0, best_x, best_v, iters_total


# ---------------------------------------------------------------------------
# upper bounds

def _scheme_upper_bound(params: SystemParams, gains: ChannelGains, scheme: Scheme) -> float:
    """Analytic bound granting each user the whole block and all energy."""
    b = params.block_budget
    if b <= 0.0:
        return 0.0
    consts = ConstantsRho.from_params(params, gains)
    c_rb = bsc_capacity(backscatter_ber(params, gains)) * params.rb
    a1 = params.eta * params.p1 * gains.h2
    a2 = 0.5 * params.eta * params.beta * params.p1 * (
        2.0 * gains.h2 + params.mu ** 2 * gains.h1 * gains.h12
    )
    e_max = max(a1, a2) * b
    cap12 = b * math.log1p(consts.rho12) / _LN2
    cap13 = b * math.log1p(consts.rho13) / _LN2
    cap_wd2 = b * math.log1p(consts.rho2 * e_max / b) / _LN2
    if scheme is Scheme.AB_COOP:
        ub1 = min(c_rb * b + cap12, cap13 + cap_wd2)
    elif scheme is Scheme.ACTIVE_COOP:
        ub1 = min(cap12, cap13 + cap_wd2)
    else:
        ub1 = cap13
    return min(ub1, cap_wd2)


def objective_upper_bound(params: SystemParams, gains: ChannelGains) -> float:
    """Finite upper bound on the max-min throughput of any scheme."""
    return max(_scheme_upper_bound(params, gains, s) for s in Scheme)


# ---------------------------------------------------------------------------
# public solve

def _zero_solution(params, gains, scheme, status, diagnostics):
    alloc = TimeAllocation()
    split = EnergySplit()
    powers = PowerAllocation()
    if status == "infeasible":
        # nothing to evaluate when even the empty schedule violates budgets
        report = RateReport(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    else:
        report = evaluate(params, gains, alloc, split, scheme)
    return Solution(scheme, alloc, split, powers, report, status, diagnostics)


def _expand(problem: _Problem, x: np.ndarray):
    def get(name):
        if name in problem.idx:
            return max(float(x[problem.idx[name]]), 0.0)
        return 0.0

    alloc = TimeAllocation(
        t1=get("t1"), t2=get("t2"), t3=get("t3"), t41=get("t41"), t42=get("t42")
    )
    split = EnergySplit(tau41=get("tau41"), tau42=get("tau42"))
    return alloc, split


def solve(
    params: SystemParams,
    gains: ChannelGains,
    scheme: Scheme = Scheme.AB_COOP,
    opts: SolverOptions | None = None,
) -> Solution:
    """Optimal time and energy allocation for one scheme.

    The returned objective is within opts.bisect_tol (relative) of the true
    optimum; the bracket top certifies that no level above
    objective * (1 + bisect_tol) is feasible (to within the barrier gap,
    about 1e-9).  Deterministic: identical inputs give identical output.
    """
    opts = opts or SolverOptions()
    if params.block_budget <= 0.0:
        return _zero_solution(
            params, gains, scheme, "infeasible", {"reason": "no usable block time"}
        )
    ub = _scheme_upper_bound(params, gains, scheme)
    if ub <= 1e-30:
        return _zero_solution(
            params, gains, scheme, "optimal",
            {"upper_bound": ub, "bisect_iterations": 0, "newton_iterations": 0,
             "certified_lower": 0.0, "certified_upper": ub},
        )
    problem = _Problem(params, gains, scheme)
    newton_total = 0

    feas0, x_inc, v0, it0 = _phase1(problem, 0.0, opts, full=True)
    newton_total += it0
    if not feas0:
        # cannot certify even the zero level: report the best effort
        alloc, split = _expand(problem, x_inc)
        powers = recover_powers(alloc, split, params, gains)
        report = evaluate(params, gains, alloc, split, scheme, tol=max(v0 * 2, 1e-9))
        return Solution(scheme, alloc, split, powers, report, "degenerate",
                        {"upper_bound": ub, "violation": v0})

    lo, hi = 0.0, ub
    bisect_iters = 0
    while hi - lo > opts.bisect_tol * max(lo, ub * 1e-12) and bisect_iters < _MAX_BISECT:
        bisect_iters += 1
        mid = 0.5 * (lo + hi)
        feas, x_mid, _, it = _phase1(problem, mid, opts, full=False)
        newton_total += it
        if feas:
            lo = mid
            x_inc = x_mid
        else:
            hi = mid

    # polish: run the final level to the barrier end for a centered point
    feas, x_fin, v_fin, it = _phase1(problem, lo, opts, full=True)
    newton_total += it
    if feas:
        x_inc = x_fin

    alloc, split = _expand(problem, x_inc)
    powers = recover_powers(alloc, split, params, gains)
    report = evaluate(params, gains, alloc, split, scheme, tol=opts.feas_tol)
    status = "optimal" if hi - lo <= opts.bisect_tol * max(lo, ub * 1e-12) else "degenerate"
    diagnostics = {
        "upper_bound": ub,
        "certified_lower": lo,
        "certified_upper": hi,
        "bisect_iterations": bisect_iters,
        "newton_iterations": newton_total,
        "final_rel_gap": (hi - lo) / max(lo, 1e-300),
    }
    return Solution(scheme, alloc, split, powers, report, status, diagnostics)


def recover_powers(
    alloc: TimeAllocation,
    split: EnergySplit,
    params: SystemParams,
    gains: ChannelGains,
) -> PowerAllocation:
    """Physical powers P = tau / t of a solution, with P = 0 for absent phases."""
    flags = []
    if alloc.t41 > 0.0:
        p41 = split.tau41 / alloc.t41
    else:
        p41 = 0.0
        if split.tau41 > 1e-15:
            flags.append("stranded_energy_tau41")
    if alloc.t42 > 0.0:
        p42 = split.tau42 / alloc.t42
    else:
        p42 = 0.0
        if split.tau42 > 1e-15:
            flags.append("stranded_energy_tau42")
    p3 = active_power_p3(params, gains, alloc.t1, alloc.t3)
    if alloc.t3 == 0.0 and alloc.t1 > 0.0:
        flags.append("phase3_absent")
    return PowerAllocation(p3=p3, p41=p41, p42=p42, flags=tuple(flags))


def solve_all_schemes(
    params: SystemParams,
    gains: ChannelGains,
    opts: SolverOptions | None = None,
) -> dict:
    """Solve every scheme; restriction order makes the values a chain."""
    return {scheme: solve(params, gains, scheme, opts) for scheme in Scheme}
