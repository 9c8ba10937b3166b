"""Diagnostics tests: ESS against analytic AR(1) values, mode reports,
frequency error, barrier profiles, and posterior risk."""

import numpy as np
import pytest

from sahmc.core import EnergyPartition, SamplerConfig, ThetaWeights
from sahmc.diagnostics import (
    barrier_profile,
    ess,
    ess_report,
    frequency_error,
    min_energy,
    mode_assignment,
    mode_report,
    posterior_risk,
    theta_convergence_check,
)
from sahmc.core import GainSchedule
from sahmc.samplers import run_chain
from sahmc.targets import bimodal_1d, standard_normal, trimodal_2d


def _ar1(n, rho, seed):
    rng = np.random.default_rng(seed)
    x = np.empty(n)
    x[0] = rng.normal()
    innov = rng.normal(size=n) * np.sqrt(1 - rho**2)
    for i in range(1, n):
        x[i] = rho * x[i - 1] + innov[i]
    return x


class TestEss:
    @pytest.mark.parametrize("rho", [0.5, 0.9])
    def test_matches_ar1_analytic(self, rho):
        n = 200000
        x = _ar1(n, rho, seed=int(rho * 100))
        analytic = n * (1 - rho) / (1 + rho)
        assert abs(ess(x) - analytic) / analytic < 0.15

    def test_iid_sequence_is_near_full(self):
        x = np.random.default_rng(0).normal(size=50000)
        assert ess(x) > 0.85 * x.size

    def test_constant_sequence_degenerate(self):
        with pytest.warns(UserWarning, match="degenerate"):
            assert ess(np.ones(500)) == 1.0

    def test_short_input_rejected(self):
        with pytest.raises(ValueError):
            ess(np.zeros(50))

    def test_clipped_to_valid_range(self):
        x = _ar1(5000, 0.999, seed=1)
        val = ess(x)
        assert 1.0 <= val <= 5000.0

    def test_report(self):
        target = standard_normal(2)
        cfg = SamplerConfig(epsilon=0.5, leapfrog_steps=8, iterations=4000, burn_in=500, seed=3)
        rep = ess_report(run_chain(cfg, target, "hmc"))
        assert rep.per_coordinate.shape == (2,)
        assert rep.minimum <= rep.median <= rep.maximum
        assert rep.seconds_per_min_ess > 0


class TestModes:
    MODES = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])

    def test_assignment_and_ties(self):
        pts = np.array([[1.0, 1.0], [9.0, 0.5], [5.0, 0.0]])
        assign = mode_assignment(pts, self.MODES)
        assert list(assign) == [0, 1, 0]  # the midpoint tie goes to index 0

    def test_report_counts_discovered_modes(self):
        pts = np.vstack([np.zeros((30, 2)), np.tile([[10.0, 0.0]], (10, 1))])
        rep = mode_report(pts, self.MODES)
        assert rep.n_dis == 2
        assert np.isclose(rep.freq.sum(), 1.0)

    def test_frequency_error_all_on_one_mode(self):
        # everything on one of K = 8 modes: (|1 - 1/8| + 7/8) / 8 = 0.21875
        assign = np.zeros(1000, dtype=int)
        assert np.isclose(frequency_error([assign], 8), 0.21875)

    def test_frequency_error_uniform_is_zero(self):
        assign = np.repeat(np.arange(8), 125)
        assert frequency_error([assign], 8) < 1e-12

    def test_zero_sample_chain_rejected(self):
        with pytest.raises(ValueError):
            frequency_error([np.empty(0, dtype=int)], 8)


class TestBarrierProfile:
    def test_plain_barrier_on_trimodal(self):
        t = trimodal_2d(-6.0, 4.0)
        b_h, b_sa, profile = barrier_profile(t, np.array([-6.0, -6.0]), np.array([4.0, 4.0]))
        assert b_h > 5.0  # deep well between the two outer modes
        assert profile.shape[1] == 3
        assert np.isclose(b_sa, b_h)  # no theta given

    def test_theta_shift_invariance(self):
        t = trimodal_2d(-6.0, 4.0)
        part = EnergyPartition.regular(0.0, 2.0, 12)
        theta = np.arange(12.0)
        args = (np.array([-6.0, -6.0]), np.array([4.0, 4.0]))
        _, b1, _ = barrier_profile(t, *args, theta=theta, partition=part)
        _, b2, _ = barrier_profile(t, *args, theta=theta + 123.0, partition=part)
        assert b1 == b2  # exact: only differences of theta enter

    def test_flattening_weights_lower_the_barrier(self):
        t = trimodal_2d(-6.0, 4.0)
        part = EnergyPartition.regular(0.0, 2.0, 12)
        # weights growing with energy penalize high regions less after subtraction
        theta = -np.arange(12.0)
        b_h, b_sa, _ = barrier_profile(
            t, np.array([-6.0, -6.0]), np.array([4.0, 4.0]), theta=theta, partition=part
        )
        assert b_sa < b_h

    def test_theta_weights_object_accepted(self):
        t = trimodal_2d(-6.0, 4.0)
        part = EnergyPartition.regular(0.0, 2.0, 12)
        w = ThetaWeights(theta=np.zeros(12), pi=np.full(12, 1 / 12))
        b_h, b_sa, _ = barrier_profile(
            t, np.array([0.0, 0.0]), np.array([4.0, 4.0]), theta=w, partition=part
        )
        assert np.isclose(b_h, b_sa)

    def test_partition_required_with_theta(self):
        t = trimodal_2d(-6.0, 4.0)
        with pytest.raises(ValueError):
            barrier_profile(t, np.zeros(2), np.ones(2), theta=np.zeros(3))


class TestThetaConvergenceCheck:
    def _record(self):
        part = EnergyPartition(thresholds=np.array([2.0, 3.0]))
        cfg = SamplerConfig(
            epsilon=0.5,
            leapfrog_steps=10,
            iterations=20000,
            burn_in=2000,
            seed=4,
            partition=part,
            gain=GainSchedule(t0=1000.0),
        )
        return run_chain(cfg, bimodal_1d(3.0, 1.0), "sahmc"), part

    def test_tail_average_uses_snapshot_mean(self):
        record, part = self._record()
        masses = np.array([0.62, 0.28, 0.10])
        rep = theta_convergence_check(
            record, None, part, None, masses=masses, tail_average=0.5
        )
        trace = np.asarray(record.theta_trace)
        start = trace.shape[0] // 2
        assert np.allclose(rep.theta, trace[start:].mean(axis=0))

    def test_zero_tail_uses_final_iterate(self):
        record, part = self._record()
        masses = np.array([0.62, 0.28, 0.10])
        rep = theta_convergence_check(record, None, part, None, masses=masses)
        assert np.array_equal(rep.theta, np.asarray(record.theta_final, dtype=float))

    def test_invalid_tail_fraction_rejected(self):
        record, part = self._record()
        with pytest.raises(ValueError, match="tail_average"):
            theta_convergence_check(
                record, None, part, None, masses=np.ones(3), tail_average=1.5
            )


class TestMinEnergyAndRisk:
    def test_min_energy(self):
        target = standard_normal(1)
        cfg = SamplerConfig(epsilon=0.5, leapfrog_steps=8, iterations=2000, seed=5)
        r = run_chain(cfg, target, "hmc")
        assert min_energy(r) == r.energies.min()
        # the global minimum of U is at the origin
        assert min_energy(r) >= 0.5 * np.log(2 * np.pi) - 1e-12

    def test_posterior_risk_zero_for_perfect_predictor(self):
        target = standard_normal(2)
        cfg = SamplerConfig(epsilon=0.5, leapfrog_steps=8, iterations=500, burn_in=100, seed=6)
        r = run_chain(cfg, target, "hmc")
        grid = np.linspace(-3, 3, 50)
        truth = np.sin
        risk = posterior_risk(r, truth, grid, lambda z, xs: np.sin(xs))
        assert risk == 0.0

    def test_posterior_risk_positive_for_biased_predictor(self):
        target = standard_normal(2)
        cfg = SamplerConfig(epsilon=0.5, leapfrog_steps=8, iterations=500, burn_in=100, seed=6)
        r = run_chain(cfg, target, "hmc")
        grid = np.linspace(-3, 3, 50)
        risk = posterior_risk(r, np.sin, grid, lambda z, xs: np.sin(xs) + 0.1)
        assert np.isclose(risk, 50 * 0.01, atol=1e-10)
