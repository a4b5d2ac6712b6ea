import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

import straightline
from netprice.errors import ParameterError
from netprice.kernels import KernelSystem
from netprice.priors import (L0Prior, OffDiagPrior, ShiftedExponentialDensity,
                             SpectralPowersPrior, SpectralScalingPrior,
                             UniformDensity, log_mixing_weight,
                             sample_offdiag_entry, sample_prior)


class TestMixingWeights:
    def test_l0_single_product_table(self):
        spec = L0Prior(n=1, alpha_mix=0.5, k_cap=1.0)
        probs = np.exp(spec.size_log_weights())
        assert probs == pytest.approx([2 / 3, 1 / 3])
        assert log_mixing_weight(spec, 1) == pytest.approx(math.log(1 / 3))

    def test_offdiag_single_product(self):
        spec = OffDiagPrior(n=1, k_cap=1.0)
        assert log_mixing_weight(spec, 1) == pytest.approx(0.0)
        assert log_mixing_weight(spec, 0) == -math.inf

    def test_l0_golden_value(self):
        spec = L0Prior(n=2, alpha_mix=0.5, k_cap=1.0)
        expect = straightline.l0_mixing_log_weight(2, 0.5, 2)
        assert expect == pytest.approx(math.log(0.25 / (1.9375 * 6)), rel=1e-12)
        assert log_mixing_weight(spec, 2) == pytest.approx(expect, rel=1e-12)

    def test_matches_straightline_everywhere(self):
        for n in (1, 2, 3):
            l0 = L0Prior(n=n, alpha_mix=0.3, k_cap=1.0)
            od = OffDiagPrior(n=n, k_cap=1.0)
            for size in range(n * n + 1):
                assert log_mixing_weight(l0, size) == pytest.approx(
                    straightline.l0_mixing_log_weight(n, 0.3, size), rel=1e-12)
                expect = straightline.offdiag_mixing_log_weight(n, size)
                got = log_mixing_weight(od, size)
                if math.isinf(expect):
                    assert math.isinf(got)
                else:
                    assert got == pytest.approx(expect, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_aggregated_weights_sum_to_one(self, n):
        for spec in (L0Prior(n=n, alpha_mix=0.4, k_cap=1.0),
                     OffDiagPrior(n=n, k_cap=1.0)):
            total = sum(math.comb(n * n, j) * math.exp(log_mixing_weight(spec, j))
                        for j in range(n * n + 1)
                        if log_mixing_weight(spec, j) > -math.inf)
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_size_out_of_range(self):
        spec = L0Prior(n=2, alpha_mix=0.5, k_cap=1.0)
        with pytest.raises(ParameterError):
            log_mixing_weight(spec, 5)

    def test_spectral_rejected(self):
        spec = SpectralPowersPrior(system=KernelSystem(1.0, 4), n=2, k_cap=1.0)
        with pytest.raises(ParameterError):
            log_mixing_weight(spec, 1)


class TestL0Draws:
    def test_frobenius_ball_always(self, rng):
        spec = L0Prior(n=3, alpha_mix=0.6, k_cap=1.0)
        for _ in range(2000):
            draw = sample_prior(spec, rng)
            assert np.linalg.norm(draw.theta) <= spec.fro_radius + 1e-12
            assert np.count_nonzero(draw.theta) == len(draw.support)

    @pytest.mark.slow
    def test_support_size_chi_square(self):
        spec = L0Prior(n=2, alpha_mix=0.5, k_cap=1.0)
        rng = np.random.default_rng(6)
        sizes = [len(sample_prior(spec, rng).support) for _ in range(100_000)]
        counts = np.bincount(sizes, minlength=5)
        expected = np.exp(spec.size_log_weights()) * len(sizes)
        _, p_value = scipy_stats.chisquare(counts, expected)
        assert p_value > 0.01


class TestOffDiagDraws:
    def test_single_product_half_normal_mean(self):
        spec = OffDiagPrior(n=1, k_cap=10.0)
        rng = np.random.default_rng(4)
        draws = [sample_prior(spec, rng).theta[0, 0] for _ in range(100_000)]
        assert np.mean(draws) == pytest.approx(math.sqrt(2 / math.pi), abs=0.01)
        assert min(draws) >= 0.0

    @pytest.mark.parametrize("n", [2, 8])
    def test_cross_entry_second_moment(self, n):
        rng = np.random.default_rng(n)
        draws = np.array([sample_offdiag_entry(n, rng) for _ in range(50_000)])
        assert np.mean(draws ** 2) == pytest.approx(1.0 / n, rel=0.05)
        # signs balance
        assert abs(np.mean(np.sign(draws))) < 0.02


class TestSpectralDraws:
    def test_difference_stationarity(self):
        # g1 - g2 equals g3 - g4, so those entries must coincide
        emb = np.array([[0.0], [0.5], [1.0], [1.5]])
        system = KernelSystem(decay_q=1.0, truncation=6)
        spec = SpectralPowersPrior(system=system, n=4, k_cap=1.0)
        draw = sample_prior(spec, np.random.default_rng(0), embeddings=emb)
        assert draw.theta[0, 1] == pytest.approx(draw.theta[2, 3], abs=1e-12)
        assert draw.theta[1, 0] == pytest.approx(draw.theta[3, 2], abs=1e-12)
        assert draw.gamma is not None

    def test_single_term_rank_correlation(self):
        emb = np.array([[0.0], [0.9], [2.0]])
        system = KernelSystem(decay_q=1.0, truncation=1)
        spec = SpectralPowersPrior(system=system, n=3, k_cap=1.0)
        draw = sample_prior(spec, np.random.default_rng(1), embeddings=emb)
        # one expansion term over the constant basis: all entries equal
        assert np.allclose(draw.theta, draw.theta[0, 0])

    def test_missing_embeddings_rejected(self):
        spec = SpectralScalingPrior(system=KernelSystem(1.0, 4), n=2, k_cap=1.0)
        with pytest.raises(ParameterError):
            sample_prior(spec, np.random.default_rng(0))

    def test_gamma_supports(self):
        system = KernelSystem(1.0, 4)
        rng = np.random.default_rng(2)
        scaling = SpectralScalingPrior(system=system, n=2, k_cap=1.0)
        powers = SpectralPowersPrior(system=system, n=2, k_cap=1.0)
        emb = np.array([[0.0], [1.0]])
        for _ in range(200):
            assert sample_prior(scaling, rng, emb).gamma >= 1.0
            assert 0.0 < sample_prior(powers, rng, emb).gamma <= 1.0


class TestDensities:
    def test_defaults_integrate_to_one(self):
        ShiftedExponentialDensity()
        UniformDensity(0.0, 1.0)
        SpectralScalingPrior(system=KernelSystem(1.0, 3), n=2, k_cap=1.0)

    def test_bad_density_rejected(self):
        class Half:
            support = (1.0, math.inf)

            def logpdf(self, g):
                return math.log(0.5) - (g - 1.0)

            def sample(self, rng):
                return 1.0 + rng.exponential()

        with pytest.raises(ParameterError):
            SpectralScalingPrior(system=KernelSystem(1.0, 3), n=2, k_cap=1.0,
                                 gamma_density=Half())

    def test_alpha_mix_validation(self):
        for bad in (0.0, 1.0, -0.2):
            with pytest.raises(ParameterError):
                L0Prior(n=2, alpha_mix=bad, k_cap=1.0)
