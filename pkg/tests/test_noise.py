"""Tests for the OU noise statistics and the exact-kernel path sampler."""

import math

import numpy as np
import pytest

from oudephase import noise
from oudephase.errors import InsufficientData, InvalidStep, NegativeTime


def adaptive_simpson(fn, a, b, tol=1e-12, depth=40):
    """Independent quadrature oracle for the kernel integrals."""

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, level):
        x1 = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        flm, frm = fn(lm), fn(rm)
        left = simpson(x0, x1, f0, flm, f1)
        right = simpson(x1, x2, f1, frm, f2)
        if level <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(x0, x1, f0, flm, f1, left, 0.5 * eps, level - 1)
                + recurse(x1, x2, f1, frm, f2, right, 0.5 * eps, level - 1))

    if a == b:
        return 0.0
    m = 0.5 * (a + b)
    fa, fm, fb = fn(a), fn(m), fn(b)
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, depth)


PARAM_GRID = [
    noise.NoiseParams(0.3, 0.05),
    noise.NoiseParams(1.0, 1.0),
    noise.NoiseParams(2.5, 40.0),
    noise.NoiseParams(0.7, 4.0),
]
TIME_GRID = [0.1, 1.0, 3.0]


class TestNoiseParams:
    def test_tau_c(self):
        assert noise.NoiseParams(1.0, 4.0).tau_c == 0.25

    @pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, -2.0), (np.inf, 1.0), (1.0, np.nan)])
    def test_rejects_bad_rates(self, bad):
        with pytest.raises(ValueError):
            noise.NoiseParams(*bad)


class TestCorrelation:
    def test_zero_lag(self):
        assert noise.correlation(noise.NoiseParams(1.0, 2.0), 0.0) == 1.0

    def test_decays_to_zero(self):
        assert noise.correlation(noise.NoiseParams(1.0, 2.0), 50.0) < 1e-40

    def test_direct_value(self):
        # (Gamma*gamma/2) e^{-gamma|tau|} at Gamma=gamma=tau=1
        expected = 0.5 * math.exp(-1.0)
        assert noise.correlation(noise.NoiseParams(1.0, 1.0), 1.0) == pytest.approx(
            expected, abs=1e-15)

    def test_symmetric_in_lag(self):
        p = noise.NoiseParams(0.8, 3.0)
        assert noise.correlation(p, -0.7) == noise.correlation(p, 0.7)


class TestMemoryCoefficient:
    def test_zero_time(self):
        assert noise.memory_coefficient_G(noise.NoiseParams(1.0, 1.0), 0.0) == 0.0

    def test_markov_plateau(self):
        p = noise.NoiseParams(2.0, 30.0)
        assert noise.memory_coefficient_G(p, 5.0) == pytest.approx(1.0, abs=1e-12)

    def test_direct_value(self):
        expected = 0.5 * (1.0 - math.exp(-1.0))
        got = noise.memory_coefficient_G(noise.NoiseParams(1.0, 1.0), 1.0)
        assert got == pytest.approx(expected, abs=1e-15)

    def test_matches_quadrature_of_kernel(self):
        for p in PARAM_GRID:
            for t in TIME_GRID:
                oracle = adaptive_simpson(lambda u: noise.correlation(p, u), 0.0, t)
                assert noise.memory_coefficient_G(p, t) == pytest.approx(oracle, abs=1e-11)

    def test_nondecreasing(self):
        p = noise.NoiseParams(1.3, 0.4)
        ts = np.linspace(0.0, 20.0, 200)
        g = noise.memory_coefficient_G(p, ts)
        assert np.all(np.diff(g) >= 0.0)

    def test_negative_time_rejected(self):
        with pytest.raises(NegativeTime):
            noise.memory_coefficient_G(noise.NoiseParams(1.0, 1.0), -0.1)


class TestDephasingExponent:
    def test_zero_time_all_modes(self):
        p = noise.NoiseParams(1.0, 1.0)
        for mode in noise.F_MODES:
            assert noise.dephasing_exponent_f(p, 0.0, mode) == 0.0

    def test_exact_value(self):
        expected = 0.5 * math.exp(-1.0)   # (1/2)(1 + e^-1 - 1)
        got = noise.dephasing_exponent_f(noise.NoiseParams(1.0, 1.0), 1.0)
        assert got == pytest.approx(expected, abs=1e-15)

    def test_exact_matches_quadrature_of_G(self):
        for p in PARAM_GRID:
            for t in TIME_GRID:
                oracle = adaptive_simpson(
                    lambda u: noise.memory_coefficient_G(p, u), 0.0, t, tol=1e-13)
                assert abs(noise.dephasing_exponent_f(p, t) - oracle) <= 1e-10

    def test_stationary_limit(self):
        p = noise.NoiseParams(1.0, 1000.0)
        exact = noise.dephasing_exponent_f(p, 1.0)
        markov = noise.dephasing_exponent_f(p, 1.0, "markov")
        assert exact == pytest.approx(0.4995, abs=1e-10)
        assert abs(exact - markov) / markov <= 1e-3

    def test_exact_below_markov_and_short(self):
        for p in PARAM_GRID:
            ts = np.linspace(0.0, 6.0, 120)
            exact = noise.dephasing_exponent_f(p, ts)
            markov = noise.dephasing_exponent_f(p, ts, "markov")
            short = noise.dephasing_exponent_f(p, ts, "short_time")
            assert np.all(exact <= markov + 1e-15)
            assert np.all(exact <= short + 1e-15)

    def test_short_time_taylor_bound(self):
        # |f_exact - f_short| / f_exact <= gamma*t for gamma*t <= 0.1
        for p in PARAM_GRID:
            ts = np.linspace(0.01, 0.1, 20) / p.gamma
            exact = noise.dephasing_exponent_f(p, ts)
            short = noise.dephasing_exponent_f(p, ts, "short_time")
            rel = np.abs(exact - short) / exact
            assert np.all(rel <= p.gamma * ts)

    def test_exact_nondecreasing(self):
        p = noise.NoiseParams(0.9, 2.2)
        ts = np.linspace(0.0, 10.0, 400)
        assert np.all(np.diff(noise.dephasing_exponent_f(p, ts)) >= 0.0)

    def test_vectorized_matches_scalar(self):
        p = noise.NoiseParams(1.4, 0.6)
        ts = np.array([0.0, 0.5, 2.5])
        vec = noise.dephasing_exponent_f(p, ts)
        assert np.array_equal(vec, [noise.dephasing_exponent_f(p, t) for t in ts])

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            noise.dephasing_exponent_f(noise.NoiseParams(1.0, 1.0), 1.0, "fast")

    def test_negative_time_rejected(self):
        with pytest.raises(NegativeTime):
            noise.dephasing_exponent_f(noise.NoiseParams(1.0, 1.0), -1.0)


class TestPathSeed:
    def test_deterministic(self):
        assert noise.path_seed(123, 7) == noise.path_seed(123, 7)

    def test_distinct_streams(self):
        seeds = {noise.path_seed(99, i) for i in range(2000)}
        assert len(seeds) == 2000

    def test_distinct_masters(self):
        assert noise.path_seed(1, 0) != noise.path_seed(2, 0)

    def test_64_bit_range(self):
        s = noise.path_seed(2**70 + 5, 3)
        assert 0 <= s < 2**64


class TestOUSamplePath:
    def test_bitwise_reproducible(self):
        p = noise.NoiseParams(1.0, 1.0)
        a = noise.ou_sample_path(p, 0.01, 500, 42)
        b = noise.ou_sample_path(p, 0.01, 500, 42)
        assert np.array_equal(a.omega, b.omega)
        assert np.array_equal(a.phase, b.phase)

    def test_distinct_seeds_differ(self):
        p = noise.NoiseParams(1.0, 1.0)
        a = noise.ou_sample_path(p, 0.01, 100, 1)
        b = noise.ou_sample_path(p, 0.01, 100, 2)
        assert not np.array_equal(a.omega, b.omega)

    def test_shapes_and_phase_start(self):
        tr = noise.ou_sample_path(noise.NoiseParams(1.0, 2.0), 0.05, 64, 3)
        assert len(tr.omega) == len(tr.phase) == 65
        assert tr.phase[0] == 0.0
        assert tr.times[-1] == pytest.approx(64 * 0.05)

    def test_phase_is_trapezoid_integral(self):
        tr = noise.ou_sample_path(noise.NoiseParams(1.0, 2.0), 0.05, 50, 4)
        manual = np.concatenate(
            [[0.0], np.cumsum(0.5 * 0.05 * (tr.omega[:-1] + tr.omega[1:]))])
        assert np.array_equal(tr.phase, manual)

    def test_zero_steps(self):
        tr = noise.ou_sample_path(noise.NoiseParams(1.0, 1.0), 0.1, 0, 5)
        assert len(tr.omega) == 1 and tr.phase[0] == 0.0

    def test_bad_step_rejected(self):
        with pytest.raises(InvalidStep):
            noise.ou_sample_path(noise.NoiseParams(1.0, 1.0), 0.0, 10, 1)

    def test_batch_rows_match_single_paths(self):
        p = noise.NoiseParams(0.8, 1.5)
        seeds = [noise.path_seed(7, i) for i in range(5)]
        omega, phase = noise.sample_path_batch(p, 0.02, 40, seeds)
        for i, seed in enumerate(seeds):
            single = noise.ou_sample_path(p, 0.02, 40, seed)
            assert np.array_equal(omega[i], single.omega)
            assert np.array_equal(phase[i], single.phase)

    def test_stationary_mean_and_variance(self):
        # ~1e6 near-independent stationary draws pooled from 2000 paths
        p = noise.NoiseParams(1.0, 1.0)
        dt = 5.0 / p.gamma
        seeds = [noise.path_seed(2024, i) for i in range(2000)]
        omega, _ = noise.sample_path_batch(p, dt, 499, seeds)
        samples = omega.ravel()
        var_true = 0.5 * p.Gamma * p.gamma
        se_mean = math.sqrt(var_true / samples.size)
        assert abs(samples.mean()) <= 4.0 * se_mean
        assert abs(samples.var() - var_true) / var_true <= 0.01

    def test_variance_stationary_in_time(self):
        p = noise.NoiseParams(1.0, 2.0)
        seeds = [noise.path_seed(55, i) for i in range(3000)]
        omega, _ = noise.sample_path_batch(p, 0.05, 40, seeds)
        var_k = omega.var(axis=0)
        var_true = 0.5 * p.Gamma * p.gamma
        band = 6.0 * var_true * math.sqrt(2.0 / 3000)
        assert np.all(np.abs(var_k - var_true) <= band)


class TestAutocovariance:
    @staticmethod
    def _paths(params, dt, n_steps, n_paths, master):
        seeds = [noise.path_seed(master, i) for i in range(n_paths)]
        omega, phase = noise.sample_path_batch(params, dt, n_steps, seeds)
        return [noise.OUTrajectory(dt=dt, omega=o, phase=f)
                for o, f in zip(omega, phase)]

    def test_lag_zero_matches_stationary_variance(self):
        p = noise.NoiseParams(1.0, 2.0)
        paths = self._paths(p, 0.05, 300, 600, 81)
        est, se = noise.estimate_autocovariance(paths, 0)
        assert abs(est - 1.0) <= 3.0 * se
        assert se < 0.05

    def test_matches_kernel_at_half_unit_lag(self):
        # (Gamma=1, gamma=2), tau=0.5 -> kernel value e^{-1}
        p = noise.NoiseParams(1.0, 2.0)
        dt = 0.05
        paths = self._paths(p, dt, 300, 600, 82)
        est, se = noise.estimate_autocovariance(paths, 10)
        assert abs(est - math.exp(-1.0)) <= 3.0 * se

    def test_normalized_lag_profile(self):
        # lag-m autocovariance / lag-0 ~ e^{-gamma m dt}, jackknife over paths
        p = noise.NoiseParams(1.0, 1.0)
        dt = 0.1
        n_paths = 500
        paths = self._paths(p, dt, 400, n_paths, 83)
        omega = np.stack([tr.omega for tr in paths])
        for lag in (1, 5, 10):
            c_lag = (omega[:, : omega.shape[1] - lag] * omega[:, lag:]).mean(axis=1)
            c_zero = (omega * omega).mean(axis=1)
            ratio = c_lag.mean() / c_zero.mean()
            loo = ((c_lag.sum() - c_lag) / (n_paths - 1)) / (
                (c_zero.sum() - c_zero) / (n_paths - 1))
            se = math.sqrt((n_paths - 1) / n_paths * np.sum((loo - loo.mean()) ** 2))
            assert abs(ratio - math.exp(-p.gamma * lag * dt)) <= 3.0 * se

    def test_constant_zero_paths(self):
        zeros = [noise.OUTrajectory(dt=0.1, omega=np.zeros(50), phase=np.zeros(50))
                 for _ in range(4)]
        est, se = noise.estimate_autocovariance(zeros, 3)
        assert est == 0.0 and se == 0.0

    def test_too_few_paths_rejected(self):
        tr = noise.ou_sample_path(noise.NoiseParams(1.0, 1.0), 0.1, 10, 1)
        with pytest.raises(InsufficientData):
            noise.estimate_autocovariance([tr], 0)

    def test_lag_beyond_length_rejected(self):
        p = noise.NoiseParams(1.0, 1.0)
        paths = [noise.ou_sample_path(p, 0.1, 10, i) for i in range(3)]
        with pytest.raises(InsufficientData):
            noise.estimate_autocovariance(paths, 11)
