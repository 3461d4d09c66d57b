"""Monte Carlo detector: determinism, degenerate limits, trend checks."""
import pytest

from wpcnrelay import (
    SystemParams,
    backscatter_ber,
    ber_curve,
    simulate_ber,
)


class TestSimulateBer:
    def test_identical_hypotheses_give_half(self, gains_9_3):
        p = SystemParams(mu=0.0, nsamp=20)
        run = simulate_ber(p, gains_9_3, bits=40000, seed=3)
        assert run.empirical_ber == pytest.approx(0.5, abs=3 * run.ci95)

    def test_noiseless_limit_errorfree(self, gains_9_3):
        p = SystemParams(n0=1e-30, ns=1e-30, nsamp=10)
        run = simulate_ber(p, gains_9_3, bits=20000, seed=5)
        assert run.errors == 0
        assert run.empirical_ber == 0.0
        assert run.ci95 > 0.0

    def test_fixed_seed_reproducible(self, params, gains_9_3):
        a = simulate_ber(params, gains_9_3, bits=30000, seed=11)
        b = simulate_ber(params, gains_9_3, bits=30000, seed=11)
        assert a == b

    def test_seed_changes_realization(self, params, gains_9_3):
        a = simulate_ber(params, gains_9_3, bits=30000, seed=11)
        b = simulate_ber(params, gains_9_3, bits=30000, seed=12)
        assert a.errors != b.errors  # same distribution, different draw

    def test_bad_bit_count_rejected(self, params, gains_9_3):
        with pytest.raises(ValueError):
            simulate_ber(params, gains_9_3, bits=0)

    def test_mid_snr_agreement_band(self, params, gains_9_3):
        """Where the closed form is in [1e-3, 0.3] the simulation agrees
        within a factor of 3 at the default operating point."""
        run = simulate_ber(params, gains_9_3, bits=100000, seed=9)
        analytic = backscatter_ber(params, gains_9_3)
        assert 1e-3 <= analytic <= 0.3
        assert analytic / 3 <= run.empirical_ber <= 3 * analytic


class TestBerCurve:
    def test_single_row(self, params, gains_9_3):
        rows = ber_curve(params, gains_9_3, [1], bits=2000, seed=1)
        assert len(rows) == 1
        assert rows[0].nsamp == 1

    def test_analytic_argument_scaling(self, params, gains_9_3):
        """Doubling N scales the detector argument by sqrt(2) exactly."""
        from wpcnrelay.link import detector_snr_argument

        a = detector_snr_argument(SystemParams(nsamp=500), gains_9_3).snr_arg
        b = detector_snr_argument(SystemParams(nsamp=1000), gains_9_3).snr_arg
        assert b == pytest.approx(a * 2 ** 0.5, rel=1e-12)

    def test_monotone_trend(self, params, gains_9_3):
        rows = ber_curve(params, gains_9_3, [10, 100, 1000], bits=30000, seed=2)
        for lo, hi in zip(rows[1:], rows[:-1]):
            assert lo.empirical_ber <= hi.empirical_ber + 2 * (lo.ci95 + hi.ci95)
        analytic = [r.analytic_ber for r in rows]
        assert analytic == sorted(analytic, reverse=True)

    def test_monotone_in_transmit_power(self, gains_9_3):
        weak = simulate_ber(SystemParams(p1=0.5, nsamp=50), gains_9_3, 30000, seed=4)
        strong = simulate_ber(SystemParams(p1=2.0, nsamp=50), gains_9_3, 30000, seed=4)
        assert strong.empirical_ber <= weak.empirical_ber + 2 * (
            weak.ci95 + strong.ci95
        )

    def test_empty_list_rejected(self, params, gains_9_3):
        with pytest.raises(ValueError):
            ber_curve(params, gains_9_3, [], bits=1000, seed=1)
