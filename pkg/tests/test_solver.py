"""Solver: bisection-certified optimality, dominance, power recovery."""
import dataclasses

import pytest

from wpcnrelay import (
    ChannelGains,
    EnergySplit,
    Geometry,
    Scheme,
    SolverOptions,
    SystemParams,
    TimeAllocation,
    evaluate,
    evaluate_physical,
    feasible,
    gains_from_geometry,
    objective_upper_bound,
    recover_powers,
    solve,
    solve_all_schemes,
)


def _forged_params(**overrides):
    """Build SystemParams bypassing validation, for unreachable edge cases."""
    p = SystemParams()
    q = object.__new__(SystemParams)
    for f in dataclasses.fields(SystemParams):
        object.__setattr__(q, f.name, overrides.get(f.name, getattr(p, f.name)))
    return q


class TestUpperBound:
    def test_dead_network(self, params):
        dead = ChannelGains(h1=0.0, h2=0.0, h12=0.0)
        assert objective_upper_bound(params, dead) == 0.0

    def test_bounds_the_optimum(self, params, gains_9_3):
        ub = objective_upper_bound(params, gains_9_3)
        best = max(s.objective for s in solve_all_schemes(params, gains_9_3).values())
        assert ub >= best

    def test_monotone_in_power(self, gains_9_3):
        ub1 = objective_upper_bound(SystemParams(p1=1.0), gains_9_3)
        ub2 = objective_upper_bound(SystemParams(p1=10.0), gains_9_3)
        assert ub2 >= ub1


class TestSolve:
    def test_dead_first_hop_zero_objective(self, params):
        gains = ChannelGains(h1=0.0, h2=1.5e-4, h12=3.8e-5)
        sol = solve(params, gains, Scheme.AB_COOP)
        assert sol.status == "optimal"
        assert sol.objective == 0.0

    def test_more_power_never_hurts(self, gains_9_3):
        lo = solve(SystemParams(p1=1.0), gains_9_3, Scheme.AB_COOP)
        hi = solve(SystemParams(p1=10.0), gains_9_3, Scheme.AB_COOP)
        assert hi.objective >= lo.objective * (1 - 1e-6)

    def test_deterministic(self, params, gains_9_3):
        a = solve(params, gains_9_3, Scheme.ACTIVE_COOP)
        b = solve(params, gains_9_3, Scheme.ACTIVE_COOP)
        assert a.alloc == b.alloc
        assert a.split == b.split
        assert a.report == b.report

    def test_solution_is_feasible(self, params, gains_9_3):
        for scheme, sol in solve_all_schemes(params, gains_9_3).items():
            rep = feasible(params, gains_9_3, sol.alloc, sol.split, scheme)
            assert rep.ok, "%s: %s" % (scheme, rep.worst(),)

    def test_certificate_brackets_objective(self, params, gains_9_3):
        opts = SolverOptions()
        sol = solve(params, gains_9_3, Scheme.AB_COOP, opts)
        lo = sol.diagnostics["certified_lower"]
        hi = sol.diagnostics["certified_upper"]
        assert sol.objective >= lo - 1e-12
        assert hi <= lo * (1 + opts.bisect_tol) + 1e-12
        assert hi <= sol.diagnostics["upper_bound"]

    def test_objective_equalizes_users(self, params, gains_9_3):
        # max-min optimum leaves no slack between the two users
        sol = solve(params, gains_9_3, Scheme.NO_COOP)
        assert sol.report.r1 == pytest.approx(sol.report.r2, rel=1e-4)

    def test_infeasible_block(self, gains_9_3):
        bad = _forged_params(t0=1.5)
        sol = solve(bad, gains_9_3, Scheme.AB_COOP)
        assert sol.status == "infeasible"

    def test_tight_energy_at_optimum(self, params, gains_9_3):
        """Unspent energy contradicts optimality: rates increase in tau."""
        sol = solve(params, gains_9_3, Scheme.AB_COOP)
        from wpcnrelay import harvest_phase1, harvest_phase2

        e2 = (
            harvest_phase1(params, gains_9_3, sol.alloc.t1)[1]
            + harvest_phase2(params, gains_9_3, sol.alloc.t2)
        )
        assert sol.split.total == pytest.approx(e2, rel=1e-4)


class TestDominance:
    @pytest.mark.parametrize("d1,d2", [(9.0, 3.0), (6.5, 2.0), (10.0, 4.5)])
    def test_restriction_chain(self, params, d1, d2):
        gains = gains_from_geometry(Geometry.collinear(d1, d2), params)
        sols = solve_all_schemes(params, gains)
        v_ab = sols[Scheme.AB_COOP].objective
        v_act = sols[Scheme.ACTIVE_COOP].objective
        v_no = sols[Scheme.NO_COOP].objective
        assert v_ab >= v_act - 1e-9
        assert v_act >= v_no - 1e-9

    def test_useless_backscatter_ties(self, params):
        # h12 = h1 and mu = 0: the backscatter phase contributes nothing
        p = SystemParams(mu=0.0)
        g = ChannelGains(h1=2e-5, h2=1.5e-4, h12=2e-5)
        v_ab = solve(p, g, Scheme.AB_COOP).objective
        v_act = solve(p, g, Scheme.ACTIVE_COOP).objective
        assert v_ab == pytest.approx(v_act, rel=1e-4)

    def test_dead_network_all_zero(self, params):
        dead = ChannelGains(h1=0.0, h2=0.0, h12=0.0)
        sols = solve_all_schemes(params, dead)
        assert all(s.objective == 0.0 for s in sols.values())


class TestRecoverPowers:
    def test_simple_division(self, params, gains_9_3):
        alloc = TimeAllocation(t41=0.1)
        split = EnergySplit(tau41=0.02)
        powers = recover_powers(alloc, split, params, gains_9_3)
        assert powers.p41 == pytest.approx(0.2, rel=1e-12)

    def test_absent_phase_zero_power(self, params, gains_9_3):
        powers = recover_powers(TimeAllocation(), EnergySplit(), params, gains_9_3)
        assert powers.p41 == 0.0
        assert powers.p42 == 0.0
        assert powers.p3 == 0.0

    def test_stranded_energy_flagged(self, params, gains_9_3):
        powers = recover_powers(
            TimeAllocation(), EnergySplit(tau41=1e-6), params, gains_9_3
        )
        assert powers.p41 == 0.0
        assert "stranded_energy_tau41" in powers.flags

    def test_solution_round_trip(self, params, gains_9_3):
        """evaluate() on recovered (t, P) matches the (t, tau) report."""
        for scheme, sol in solve_all_schemes(params, gains_9_3).items():
            powers = recover_powers(sol.alloc, sol.split, params, gains_9_3)
            phys = evaluate_physical(params, gains_9_3, sol.alloc, powers, scheme)
            assert phys.objective == pytest.approx(
                sol.report.objective, rel=1e-12, abs=1e-300
            )
            assert phys.r1 == pytest.approx(sol.report.r1, rel=1e-12, abs=1e-300)
            assert phys.r2 == pytest.approx(sol.report.r2, rel=1e-12, abs=1e-300)
