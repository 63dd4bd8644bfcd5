import math

import numpy as np
import pytest

from blocksgd.bootstrap import derive_rng
from blocksgd.datagen import (
    MODELS,
    THETA_STAR,
    VAR_COEF,
    VAR_INTERCEPT,
    Ma1Process,
    VarProcess,
    gen_ma1,
    gen_model,
    ma1_theory,
    spectral_radius,
)


class TestModelSpecs:
    def test_families(self):
        assert [MODELS[i].family for i in range(1, 7)] == [
            "linear", "lad", "logistic", "linear", "lad", "logistic",
        ]
        assert [MODELS[i].dependent for i in range(1, 7)] == [False] * 3 + [True] * 3

    def test_theta_star(self):
        assert np.array_equal(THETA_STAR, np.array([0.2, -0.3, 0.5, -0.25]))


class TestGenModel:
    def test_empty(self):
        x, y = gen_model(MODELS[1], 0, derive_rng(0))
        assert x.shape == (0, 4) and y.shape == (0,)

    def test_determinism(self):
        for mid in range(1, 7):
            a = gen_model(MODELS[mid], 300, derive_rng(7, mid))
            b = gen_model(MODELS[mid], 300, derive_rng(7, mid))
            assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_intercept_column(self):
        for mid in (1, 4):
            x, _ = gen_model(MODELS[mid], 50, derive_rng(1))
            assert np.all(x[:, 3] == 1.0)

    def test_iid_covariate_mean(self):
        x, _ = gen_model(MODELS[1], 10**6, derive_rng(100))
        assert np.allclose(x[:, :3].mean(axis=0), VAR_INTERCEPT, atol=0.01)

    def test_model1_noise_is_heteroskedastic(self):
        x, y = gen_model(MODELS[1], 10**6, derive_rng(101))
        eps = y - x @ THETA_STAR
        norms = np.sum(x[:, :3] ** 2, axis=1)
        small = eps[norms < np.quantile(norms, 0.2)]
        large = eps[norms > np.quantile(norms, 0.8)]
        assert large.var() > 1.5 * small.var()
        # overall variance: E[(|X|^2 + 1)/4] = (3 + |mu|^2 + 1) / 4 = 1.125
        assert abs(eps.var() - 1.125) < 0.02

    def test_model4_noise_moments(self):
        x, y = gen_model(MODELS[4], 10**6, derive_rng(102))
        eps = y - x @ THETA_STAR
        assert abs(eps.var() - 3.0) < 0.05
        assert abs(eps.mean()) < 0.01

    def test_models45_noise_is_two_dependent(self):
        x, y = gen_model(MODELS[5], 10**6, derive_rng(103))
        eps = y - x @ THETA_STAR
        centered = eps - eps.mean()
        for lag, bound in ((1, None), (2, None), (3, 0.01), (4, 0.01)):
            corr = np.mean(centered[lag:] * centered[:-lag]) / centered.var()
            if bound is not None:
                assert abs(corr) < bound
        lag1 = np.mean(centered[1:] * centered[:-1]) / centered.var()
        assert lag1 > 0.5  # strong short-range dependence by construction

    def test_logistic_responses_are_signs(self):
        for mid in (3, 6):
            _, y = gen_model(MODELS[mid], 2000, derive_rng(104))
            assert set(np.unique(y)) <= {-1.0, 1.0}

    def test_model3_conditional_probabilities(self):
        x, y = gen_model(MODELS[3], 10**6, derive_rng(105))
        margin = x @ THETA_STAR
        band = (margin > 0.4) & (margin < 0.6)  # around margin 0.5
        emp = np.mean(y[band] == 1.0)
        expected = 1.0 / (1.0 + math.exp(-0.5))
        assert abs(emp - expected) < 0.01

    def test_model6_noise_marginal_and_dependence(self):
        x, y = gen_model(MODELS[6], 10**6, derive_rng(106))
        # responses flip with the mixed noise; two consecutive draws share an
        # innovation half the time, so adjacent responses are correlated
        y_centered = y - y.mean()
        lag1 = np.mean(y_centered[1:] * y_centered[:-1]) / y.var()
        assert lag1 > 0.02


class TestVarProcess:
    def test_spectral_radius_estimate(self):
        est = spectral_radius(VAR_COEF)
        exact = max(abs(np.linalg.eigvals(VAR_COEF)))
        assert est < 0.999
        assert est == pytest.approx(exact, rel=1e-6)

    def test_unstable_matrix_rejected(self):
        with pytest.raises(ValueError):
            VarProcess(coef=np.eye(3) * 1.05)

    def test_stationary_mean_matches_linear_solve(self):
        proc = VarProcess()
        draws = proc.sample(10**6, derive_rng(107))
        oracle = np.linalg.solve(np.eye(3) - VAR_COEF, VAR_INTERCEPT)
        assert np.allclose(draws.mean(axis=0), oracle, atol=0.02)
        assert np.allclose(proc.stationary_mean, oracle, rtol=1e-12)

    def test_burn_in_removes_transient(self):
        # distribution of the first retained draw matches a later one
        firsts = np.array([VarProcess().sample(1, derive_rng(200, i))[0] for i in range(2000)])
        assert np.allclose(firsts.mean(axis=0), VarProcess().stationary_mean, atol=0.12)


class TestMa1:
    def test_theory_values(self):
        assert ma1_theory(math.sqrt(0.5)) == {"r0": 1.0, "r1": 0.5, "longrun": 2.0}
        assert ma1_theory(0.0) == {"r0": 0.0, "r1": 0.0, "longrun": 0.0}
        assert ma1_theory(1.0) == {"r0": 2.0, "r1": 1.0, "longrun": 4.0}

    def test_sample_autocovariances(self):
        n = 10**6
        y = gen_ma1(0.7, math.sqrt(0.5), n, derive_rng(108))
        centered = y - y.mean()
        assert abs(y.mean() - 0.7) < 0.01
        assert abs(centered.var() - 1.0) < 0.01
        lag1 = np.mean(centered[1:] * centered[:-1])
        lag2 = np.mean(centered[2:] * centered[:-2])
        assert abs(lag1 - 0.5) < 0.01
        assert abs(lag2) < 0.01

    def test_one_dependence_by_construction(self):
        proc = Ma1Process(0.0, 1.0)
        y = proc.sample(10**6, derive_rng(109))
        centered = y - y.mean()
        for lag in (2, 3, 5):
            corr = np.mean(centered[lag:] * centered[:-lag]) / centered.var()
            assert abs(corr) < 0.01

    def test_sigma_zero_degenerate(self):
        y = gen_ma1(1.5, 0.0, 100, derive_rng(110))
        assert np.all(y == 1.5)
