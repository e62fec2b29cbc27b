import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricprobe.ensemble import (
    CHUNK_SIZE,
    ExperimentConfig,
    analytic_reference,
    run_experiment,
    seeded_stream,
    z_score,
)
from metricprobe.protocol import MetricSuperposition, ProperTimes, QubitParams, w_closed_form

from conftest import random_physics

S = 1 / math.sqrt(2)


def config(omega_delta=0.0, alpha_sq=0.5, omega_dtau=0.0, trials=100_000, seed=1, **kw):
    params = QubitParams(0.0, 1.0)
    times = ProperTimes(max(0.0, -omega_dtau), max(0.0, omega_dtau))
    return ExperimentConfig(params, times, MetricSuperposition.from_weights(alpha_sq, omega_delta),
                            trials=trials, seed=seed, **kw)


def within(est, ref, err, k=4.0):
    return abs(est - ref) <= k * err


class TestConfig:
    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError, match="trials"):
            config(trials=0)

    def test_rejects_empty_bases(self):
        with pytest.raises(ValueError, match="basis"):
            config(bases=())

    def test_rejects_unknown_basis(self):
        with pytest.raises(ValueError, match="unknown"):
            config(bases=("X", "W"))

    def test_normalizes_case(self):
        assert config(bases=("x", "z")).bases == ("X", "Z")


class TestAnalyticReference:
    def test_w_zero(self):
        ref = analytic_reference(config(omega_delta=math.pi))
        np.testing.assert_allclose(ref.bloch, 0, atol=1e-12)
        assert ref.purity == pytest.approx(0.5, abs=1e-12)

    def test_unit_w(self):
        ref = analytic_reference(config(alpha_sq=1.0, omega_dtau=0.7))
        assert np.linalg.norm(ref.bloch) == pytest.approx(1, abs=1e-12)
        assert ref.purity == pytest.approx(1, abs=1e-12)

    def test_half_w_squared(self):
        # 4 a^2 b^2 sin^2(x/2) = 1/2 at a^2 = 1/2  ->  x = pi/2
        ref = analytic_reference(config(omega_delta=math.pi / 2))
        assert ref.purity == pytest.approx(0.75, abs=1e-12)

    def test_bloch_carries_w(self, rng):
        for _ in range(50):
            params, times, g = random_physics(rng)
            cfg = ExperimentConfig(params, times, g, trials=1, seed=0)
            w = w_closed_form(params, times, g).value
            np.testing.assert_allclose(analytic_reference(cfg).bloch, [-w.real, w.imag, 0], atol=1e-12)


class TestRunExperiment:
    def test_beta_zero_is_pure(self):
        cfg = config(alpha_sq=1.0, omega_delta=2.0)
        est, ref = run_experiment(cfg), analytic_reference(cfg)
        np.testing.assert_allclose(ref.bloch, [-1, 0, 0], atol=1e-12)
        for i in range(3):
            assert within(est.bloch[i], ref.bloch[i], max(est.bloch_stderr[i], 1e-15))
        assert within(est.purity_estimate, 1.0, est.purity_stderr)

    def test_maximally_mixed(self):
        cfg = config(omega_delta=math.pi)
        est = run_experiment(cfg)
        assert np.all(np.abs(est.bloch) <= 4 * est.bloch_stderr)
        assert within(est.purity_estimate, 0.5, est.purity_stderr)

    def test_plus_fraction(self, rng):
        for seed in range(10):
            params, times, g = random_physics(rng)
            est = run_experiment(ExperimentConfig(params, times, g, trials=20_000, seed=seed))
            assert within(est.plus_fraction, 0.5, math.sqrt(0.25 / 20_000))

    def test_bloch_within_unit_ball_slack(self, rng):
        for seed in range(10):
            params, times, g = random_physics(rng)
            est = run_experiment(ExperimentConfig(params, times, g, trials=5_000, seed=seed))
            assert np.all(np.abs(est.bloch) <= 1 + 3 * est.bloch_stderr)
            assert 0.5 - 3 * est.purity_stderr <= est.purity_estimate <= 1 + 3 * est.purity_stderr

    def test_basis_cycling_allocation(self):
        est = run_experiment(config(trials=10, bases=("X", "Y", "Z")))
        np.testing.assert_array_equal(est.counts, [4, 3, 3])
        est = run_experiment(config(trials=10, bases=("Z", "X")))
        np.testing.assert_array_equal(est.counts, [5, 0, 5])

    def test_unconfigured_axis_reported_zero(self):
        est = run_experiment(config(trials=1000, bases=("X",)))
        assert est.bloch[1] == est.bloch[2] == 0.0
        assert est.bloch_stderr[1] == est.bloch_stderr[2] == 0.0

    def test_single_trial_undefined_errors(self):
        est = run_experiment(config(trials=1))
        assert est.trials == 1
        assert math.isnan(est.bloch_stderr[0])
        assert math.isnan(est.purity_stderr)

    def test_minus_trials_pooled(self):
        # with X only and a state on the -X axis, every pooled outcome is -1
        est = run_experiment(config(trials=5000, alpha_sq=1.0, bases=("X",)))
        assert 0 < est.plus_fraction < 1
        assert est.bloch[0] == -1.0


class TestDeterminism:
    def test_same_seed_identical(self):
        a, b = run_experiment(config(seed=7)), run_experiment(config(seed=7))
        np.testing.assert_array_equal(a.bloch, b.bloch)
        assert a.purity_estimate == b.purity_estimate
        assert a.plus_fraction == b.plus_fraction

    def test_seeded_stream_reproducible(self):
        np.testing.assert_array_equal(seeded_stream(3, 1).random(8), seeded_stream(3, 1).random(8))
        assert not np.array_equal(seeded_stream(3, 1).random(8), seeded_stream(3, 2).random(8))

    def test_stream_ids_differ_but_agree(self):
        cfg_a = config(omega_delta=1.0, stream_id=0)
        cfg_b = config(omega_delta=1.0, stream_id=1)
        a, b = run_experiment(cfg_a), run_experiment(cfg_b)
        ref = analytic_reference(cfg_a)
        assert a.purity_estimate != b.purity_estimate
        for est in (a, b):
            assert within(est.purity_estimate, ref.purity, est.purity_stderr)

    def test_worker_count_irrelevant(self):
        cfg = config(omega_delta=0.4, trials=3 * CHUNK_SIZE + 17)
        one, four = run_experiment(cfg, workers=1), run_experiment(cfg, workers=4)
        np.testing.assert_array_equal(one.bloch, four.bloch)
        np.testing.assert_array_equal(one.counts, four.counts)
        assert one.purity_estimate == four.purity_estimate


class TestZScore:
    def test_regular(self):
        assert z_score(1.5, 1.0, 0.25) == 2.0

    def test_undefined(self):
        assert math.isnan(z_score(1.0, 0.5, math.nan))

    def test_exact_zero_error(self):
        assert z_score(1.0, 1.0, 0.0) == 0.0
        assert z_score(1.0, 0.5, 0.0) == math.inf


@pytest.mark.slow
def test_purity_coverage_three_sigma():
    rng = np.random.default_rng(314)
    inside = 0
    for seed in range(200):
        params, times, g = random_physics(rng)
        cfg = ExperimentConfig(params, times, g, trials=100_000, seed=seed)
        est, ref = run_experiment(cfg), analytic_reference(cfg)
        inside += within(est.purity_estimate, ref.purity, est.purity_stderr, k=3)
    assert inside >= 198


def test_purity_estimator_unbiased():
    # mean over many small runs pins the bias well below one stderr of a single run
    cfg = config(omega_delta=2.0, trials=300)
    ref = analytic_reference(cfg).purity
    ests = [run_experiment(ExperimentConfig(cfg.params, cfg.times, cfg.g, 300, seed)).purity_estimate
            for seed in range(2000)]
    sem = np.std(ests) / math.sqrt(len(ests))
    assert abs(np.mean(ests) - ref) <= 4 * sem


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(-7, 7), st.integers(0, 2**32))
def test_estimates_track_reference(alpha_sq, omega_delta, seed):
    cfg = config(omega_delta=omega_delta, alpha_sq=alpha_sq, trials=20_000, seed=seed)
    est, ref = run_experiment(cfg), analytic_reference(cfg)
    assert abs(est.purity_estimate - ref.purity) <= 6 * est.purity_stderr + 1e-12
    assert abs(est.plus_fraction - 0.5) <= 6 * math.sqrt(0.25 / cfg.trials)
