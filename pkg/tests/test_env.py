import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netprice.env import (EnvSpec, expected_revenue, gen_theta_l0,
                          gen_theta_offdiag, gen_theta_spectral, step)
from netprice.errors import DomainError, ParameterError
from netprice.kernels import KernelSystem, SeriesFunction, power_norm
from netprice.oracles import revenue_loop


def make_env(theta, sigma=0.1, l=1.0, k=None):
    n = theta.shape[0]
    return EnvSpec(n_products=n, baseline_demand=np.ones(n), theta_star=theta,
                   noise_sigma=sigma, noise_q=sigma, price_radius=l,
                   norm_bound=k or max(np.linalg.norm(theta, 2), 1e-6) * 1.01)


class TestGenThetaL0:
    def test_empty_support_is_zero(self):
        assert not np.any(gen_theta_l0(2, 0, 1.0, seed=0))

    def test_scalar_norm_rule(self):
        for seed in range(30):
            theta = gen_theta_l0(1, 1, 0.5, seed=seed)
            raw = np.random.default_rng(seed)
            raw.choice(1, size=1, replace=False)
            value = raw.uniform(-1.0, 1.0)
            expect = value if abs(value) <= 0.5 else np.sign(value) * 0.5
            assert theta[0, 0] == pytest.approx(expect, abs=1e-15)

    def test_support_count_and_norm(self):
        theta = gen_theta_l0(3, 4, 0.8, seed=7)
        assert np.count_nonzero(theta) == 4
        assert np.linalg.norm(theta, 2) <= 0.8 + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(1, 5), frac=st.floats(0.0, 1.0), seed=st.integers(0, 10**6))
    def test_exact_support_size(self, n, frac, seed):
        s = int(round(frac * n * n))
        theta = gen_theta_l0(n, s, 1.5, seed=seed)
        assert np.count_nonzero(theta) == s
        assert np.linalg.norm(theta, 2) <= 1.5 + 1e-12

    def test_determinism(self):
        a = gen_theta_l0(4, 7, 1.0, seed=99)
        b = gen_theta_l0(4, 7, 1.0, seed=99)
        assert np.array_equal(a, b)

    def test_bad_support_size(self):
        with pytest.raises(ParameterError):
            gen_theta_l0(2, 5, 1.0, seed=0)
        with pytest.raises(ParameterError):
            gen_theta_l0(2, -1, 1.0, seed=0)


class TestGenThetaOffdiag:
    def test_single_product_only_diagonal(self):
        theta = gen_theta_offdiag(1, 1.0, seed=2)
        assert theta.shape == (1, 1)
        assert -2.0 <= theta[0, 0] <= -0.5

    def test_offdiag_magnitudes_bounded(self):
        theta = gen_theta_offdiag(4, 1.0, seed=5)
        off = theta[~np.eye(4, dtype=bool)]
        assert np.all(np.abs(off) <= 0.25)

    def test_gershgorin_operator_norm(self):
        theta = gen_theta_offdiag(8, 1.0, seed=3)
        bound = np.max(np.abs(np.diag(theta))) + 1.0
        assert np.linalg.norm(theta, 2) <= bound

    def test_diag_range_validation(self):
        with pytest.raises(ParameterError):
            gen_theta_offdiag(2, 1.0, diag_range=(-0.5, -2.0), seed=0)


class TestGenThetaSpectral:
    def setup_method(self):
        self.system = KernelSystem(decay_q=1.0, truncation=8)
        rng = np.random.default_rng(0)
        self.embeddings = rng.uniform(-np.pi, np.pi, size=(5, 1))

    def test_single_term_expansion(self):
        system = KernelSystem(decay_q=1.0, truncation=1)
        theta, kappa = gen_theta_spectral(self.embeddings, system, 0.5, coeff_seed=4)
        # one basis function (the constant): kappa is constant, so all
        # off-diagonal entries coincide with mu_1^(alpha/2) * a_1 * e_1
        off = theta[~np.eye(5, dtype=bool)]
        assert np.allclose(off, off[0])
        assert off[0] == pytest.approx(kappa(np.zeros(1)))

    def test_unit_power_norm(self):
        for alpha in (0.4, 0.7, 1.0):
            _, kappa = gen_theta_spectral(self.embeddings, self.system, alpha,
                                          coeff_seed=11)
            assert power_norm(kappa, alpha) == pytest.approx(1.0, abs=1e-12)

    def test_even_basis_gives_symmetric_offdiagonal(self):
        # keep only cosine (even) coefficients of a generating function
        _, kappa = gen_theta_spectral(self.embeddings, self.system, 0.7,
                                      coeff_seed=11)
        coeffs = kappa.coeffs.copy()
        coeffs[2::2] = 0.0  # zero the sine terms (indices 3, 5, ... 1-based)
        even = SeriesFunction(coeffs, self.system)
        diffs = self.embeddings[:, None, :] - self.embeddings[None, :, :]
        vals = even(diffs.reshape(-1, 1)).reshape(5, 5)
        assert np.allclose(vals, vals.T, atol=1e-12)

    def test_empty_embeddings_rejected(self):
        with pytest.raises(ParameterError):
            gen_theta_spectral(np.zeros((0, 1)), self.system, 0.5, coeff_seed=0)

    def test_duplicate_embeddings_rejected(self):
        emb = np.array([[0.1], [0.1]])
        with pytest.raises(ParameterError):
            gen_theta_spectral(emb, self.system, 0.5, coeff_seed=0)


class TestStep:
    def test_noiseless_limit(self):
        theta = gen_theta_l0(3, 4, 1.0, seed=1)
        env = make_env(theta, sigma=1e-12)
        rng = np.random.default_rng(0)
        p = np.array([0.3, -0.4, 0.5])
        sample = step(env, p, rng)
        assert np.allclose(sample.demand, theta @ p, atol=1e-9)

    @pytest.mark.slow
    def test_zero_price_noise_mean(self):
        env = make_env(np.zeros((2, 2)), sigma=0.5, k=1.0)
        rng = np.random.default_rng(7)
        draws = np.array([step(env, np.zeros(2), rng).demand for _ in range(100_000)])
        tol = 4 * env.noise_sigma / np.sqrt(100_000)
        assert np.all(np.abs(draws.mean(axis=0)) <= tol)

    def test_identity_theta_mean(self):
        env = make_env(np.eye(2), sigma=0.05, l=1.0, k=1.5)
        rng = np.random.default_rng(3)
        p = np.array([1.0, 0.0])
        draws = np.array([step(env, p, rng).demand[0] for _ in range(20_000)])
        assert draws.mean() == pytest.approx(1.0, abs=4 * 0.05 / np.sqrt(20_000))

    def test_price_outside_ball_rejected(self):
        env = make_env(np.eye(2), k=1.5)
        with pytest.raises(DomainError):
            step(env, np.array([1.0, 1.0]), np.random.default_rng(0))

    def test_determinism(self):
        env = make_env(np.eye(2), k=1.5)
        d1 = step(env, np.array([0.5, 0.0]), np.random.default_rng(5)).demand
        d2 = step(env, np.array([0.5, 0.0]), np.random.default_rng(5)).demand
        assert np.array_equal(d1, d2)


class TestExpectedRevenue:
    def test_zero_theta(self):
        assert expected_revenue(np.zeros((2, 2)), np.array([2.0, 1.0]),
                                np.array([1.0, 0.0])) == pytest.approx(2.0)

    def test_negative_identity(self):
        assert expected_revenue(-np.eye(2), np.ones(2),
                                np.ones(2)) == pytest.approx(0.0)

    def test_matches_loop_oracle(self, rng):
        for _ in range(10):
            theta = rng.normal(size=(3, 3))
            d0 = rng.uniform(0.5, 2.0, size=3)
            p = rng.normal(size=3)
            assert expected_revenue(theta, d0, p) == pytest.approx(
                revenue_loop(theta, d0, p), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            expected_revenue(np.eye(2), np.ones(3), np.ones(2))

    @pytest.mark.slow
    def test_monte_carlo_revenue(self):
        theta = gen_theta_l0(3, 5, 1.0, seed=2)
        env = make_env(theta, sigma=0.2)
        rng = np.random.default_rng(11)
        p = np.array([0.5, -0.3, 0.2])
        sims = np.array([p @ (env.baseline_demand + theta @ p
                              + env.noise_sigma * rng.standard_normal(3))
                        for _ in range(100_000)])
        tol = 4 * env.price_radius * env.noise_sigma * np.sqrt(3) / np.sqrt(100_000)
        assert sims.mean() == pytest.approx(
            expected_revenue(theta, env.baseline_demand, p), abs=tol)


class TestEnvSpec:
    def test_norm_bound_checked(self):
        with pytest.raises(ParameterError):
            EnvSpec(n_products=2, baseline_demand=np.ones(2),
                    theta_star=3.0 * np.eye(2), noise_sigma=0.1, noise_q=0.1,
                    price_radius=1.0, norm_bound=1.0)

    def test_positive_baseline_checked(self):
        with pytest.raises(ParameterError):
            EnvSpec(n_products=2, baseline_demand=np.array([1.0, 0.0]),
                    theta_star=np.eye(2) * 0.5, noise_sigma=0.1, noise_q=0.1,
                    price_radius=1.0, norm_bound=1.0)

    def test_generators_pass_norm_check(self):
        # every generator output admissible with the cap it was built for
        make_env(gen_theta_l0(3, 5, 1.2, seed=0), k=1.2)
        theta = gen_theta_offdiag(4, 1.0, seed=1)
        make_env(theta, k=np.max(np.abs(np.diag(theta))) + 1.0)
        system = KernelSystem(decay_q=1.0, truncation=8)
        emb = np.random.default_rng(2).uniform(-np.pi, np.pi, size=(3, 1))
        theta, _ = gen_theta_spectral(emb, system, 0.7, coeff_seed=3)
        make_env(theta, k=3.5)
