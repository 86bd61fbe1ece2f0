"""
Tests for photon-number distributions and the generalized binomial distribution
"""
import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import gammaln

from photon_gbd.distributions import (
    be_pmf, binomial_pmf, binomial_table, bunching_ratio, degeneracy_from_temperature,
    gbd, gbd_table, log_pmf, log_pmf_table, log_rising_factorial, log_rising_factorials,
    one_photon_table, pmf, pmf_table, pmf_tv_distance, poisson_pmf, polya_pmf, polya_table,
    split_probabilities, three_photon_table, two_photon_table, verify_convolution,
    verify_vandermonde
)
from photon_gbd.models import PhaseVolume, SplitSpec, StatModel
from photon_gbd.utils import DegenerateDenominatorError, DomainError, ValidationError


class TestRisingFactorial:

    def test_integer_argument(self):
        assert log_rising_factorial(1.0, 5) == pytest.approx(math.log(120.0), rel=1e-14)
        assert log_rising_factorial(3.0, 0) == 0.0

    def test_direct_and_log_gamma_paths_agree(self):
        x = 2.5
        table = log_rising_factorials(x, 100)
        ks = np.arange(101)
        np.testing.assert_allclose(table, gammaln(x + ks) - gammaln(x), rtol=1e-12, atol=1e-12)

    def test_scalar_indexes_table(self):
        assert log_rising_factorial(0.7, 80) == log_rising_factorials(0.7, 80)[80]

    def test_domain(self):
        np.testing.assert_array_equal(log_rising_factorials(0.0, 0), [0.0])
        with pytest.raises(DomainError):
            log_rising_factorials(0.0, 1)
        with pytest.raises(DomainError):
            log_rising_factorials(-1.0, 3)


class TestPhotonCountDistributions:

    def test_poisson_examples(self):
        assert poisson_pmf(0, 1.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert poisson_pmf(2, 2.0, 0.5) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-13)

    def test_poisson_matches_scipy(self):
        for k in range(30):
            assert poisson_pmf(k, 3.0, 1.7) == pytest.approx(stats.poisson.pmf(k, 5.1), rel=1e-12)

    def test_be_single_cell_is_geometric(self):
        assert be_pmf(0, 1.0, 1.0) == pytest.approx(0.5)
        assert be_pmf(1, 1.0, 1.0) == pytest.approx(0.25)

    def test_be_matches_negative_binomial(self):
        A, w = 2.7, 0.8
        for k in range(40):
            expected = stats.nbinom.pmf(k, A, 1.0 / (1.0 + w))
            assert be_pmf(k, A, w) == pytest.approx(expected, rel=1e-11)

    def test_vacuum(self):
        assert be_pmf(0, 3.0, 0.0) == 1.0
        assert be_pmf(2, 3.0, 0.0) == 0.0
        assert poisson_pmf(0, 1.0, 0.0) == 1.0
        assert log_pmf(StatModel.poisson(0.0), 3, 1.0) == -math.inf

    def test_glauber_vacuum_probability(self):
        p0 = pmf(StatModel.glauber(1.0, 1.0), 0, 1.0)
        assert p0 == pytest.approx(math.exp(-(math.sqrt(3.0) - 1.0)), rel=1e-12)

    def test_log_pmf_table_matches_scalar(self, be_model):
        table = log_pmf_table(be_model, 1.3, 20)
        for k in (0, 5, 20):
            assert table[k] == pytest.approx(log_pmf(be_model, k, 1.3), rel=1e-13)

    def test_degeneracy_from_temperature(self):
        temperature = 300.0
        frequency = math.log(2.0) * 1.380649e-23 * temperature / 6.62607015e-34
        assert degeneracy_from_temperature(frequency, temperature).w == pytest.approx(1.0)
        assert degeneracy_from_temperature(1e20, 1.0).w == 0.0

    def test_split_probabilities(self):
        split = split_probabilities(1.0, 3.0)
        assert split.alpha == pytest.approx(0.25)
        assert split.beta == pytest.approx(0.75)


class TestPmfTable:

    @pytest.mark.parametrize("model,volume", [
        (StatModel.poisson(1.0), 5.0),
        (StatModel.bose_einstein(3.0), 0.5),
        (StatModel.bose_einstein(0.3), 10.0),
        (StatModel.glauber(1.0, 1.0), 2.0),
    ])
    def test_auto_truncation_is_certified(self, model, volume):
        table = pmf_table(model, volume)
        assert table.tail_bound < 1e-12
        assert table.total + table.tail_bound == pytest.approx(1.0, abs=1e-9)

    def test_explicit_k_max(self, be_model):
        table = pmf_table(be_model, 1.0, 5)
        np.testing.assert_allclose(table.probs, 0.5 ** np.arange(1, 7), rtol=1e-13)
        assert table.tail_bound == pytest.approx(2.0 ** -6, rel=1e-9)

    def test_vacuum_table(self):
        table = pmf_table(StatModel.poisson(0.0), 1.0)
        np.testing.assert_array_equal(table.probs, [1.0])
        assert table.tail_bound == 0.0


class TestGeneralizedBinomial:

    def test_normalization(self, be_model, poisson_model):
        for model in (be_model, poisson_model, StatModel.bose_einstein(0.3)):
            for n in (0, 1, 7, 50, 200):
                row = gbd_table(n, model, 0.7, 2.1)
                assert math.fsum(row.w_values) == pytest.approx(1.0, abs=1e-10)

    def test_poisson_gives_binomial(self, poisson_model):
        split = split_probabilities(1.3, 2.7)
        for k in range(11):
            assert gbd(k, 10, poisson_model, 1.3, 2.7) == pytest.approx(
                binomial_pmf(k, 10, split), rel=1e-12)

    def test_poisson_gives_binomial_for_every_n(self, poisson_model):
        split = split_probabilities(1.3, 2.7)
        for n in range(101):
            worst = max(abs(gbd(k, n, poisson_model, 1.3, 2.7) - binomial_pmf(k, n, split))
                        for k in range(n + 1))
            assert worst < 1e-13, n

    def test_be_gives_polya_independent_of_w(self):
        A, B = 0.6, 1.9
        split = split_probabilities(A, B)
        for k in range(9):
            low = gbd(k, 8, StatModel.bose_einstein(0.3), A, B)
            high = gbd(k, 8, StatModel.bose_einstein(2.0), A, B)
            assert low == pytest.approx(high, rel=1e-11)
            assert low == pytest.approx(polya_pmf(k, 8, split, A + B), rel=1e-11)

    def test_k_greater_than_n(self, be_model):
        with pytest.raises(ValidationError):
            gbd(3, 2, be_model, 1.0, 1.0)

    def test_degenerate_denominator(self, poisson_model):
        with pytest.raises(DegenerateDenominatorError):
            gbd(0, 20000, poisson_model, 0.5, 0.5)

    def test_binomial_matches_scipy(self):
        split = SplitSpec.from_alpha(0.3)
        row = binomial_table(20, split)
        np.testing.assert_allclose(row.w_values, stats.binom.pmf(np.arange(21), 20, 0.3),
                                   rtol=1e-12)


class TestPolya:

    def test_single_photon_ignores_volume(self):
        split = SplitSpec.from_alpha(0.3)
        for S in (1e-3, 1.0, 1e3):
            assert polya_pmf(1, 1, split, S) == pytest.approx(0.3, rel=1e-14)
            np.testing.assert_allclose(one_photon_table(split, S).w_values, [0.7, 0.3])

    def test_two_photons_at_unit_volume(self, half_split):
        expected = [0.375, 0.25, 0.375]
        np.testing.assert_allclose(polya_table(2, half_split, 1.0).w_values, expected,
                                   rtol=1e-14)
        np.testing.assert_allclose(two_photon_table(half_split, 1.0).w_values, expected,
                                   rtol=1e-14)

    def test_closed_forms_match_general_formula(self):
        split = SplitSpec.from_alpha(0.55)
        for S in (0.01, 1.0, 37.0):
            np.testing.assert_allclose(two_photon_table(split, S).w_values,
                                       polya_table(2, split, S).w_values, rtol=1e-12)
            np.testing.assert_allclose(three_photon_table(split, S).w_values,
                                       polya_table(3, split, S).w_values, rtol=1e-12)

    def test_three_photon_classical_limit(self):
        a = 0.55
        b = 1.0 - a
        row = three_photon_table(SplitSpec.from_alpha(a), 1e8)
        np.testing.assert_allclose(row.w_values, [b ** 3, 3 * a * b ** 2, 3 * a ** 2 * b, a ** 3],
                                   atol=1e-6)

    def test_polya_matches_beta_binomial(self):
        split = SplitSpec.from_alpha(0.3)
        S, n = 4.2, 25
        oracle = stats.betabinom.pmf(np.arange(n + 1), n, 0.3 * S, 0.7 * S)
        np.testing.assert_allclose(polya_table(n, split, S).w_values, oracle, rtol=1e-10)

    def test_fifty_photons_edge_value(self, half_split):
        edge = polya_pmf(0, 50, half_split, 1.0)
        assert edge == pytest.approx(stats.betabinom.pmf(0, 50, 0.5, 0.5), rel=1e-10)
        assert edge == pytest.approx(0.0795, abs=1e-3)
        assert polya_pmf(50, 50, half_split, 1.0) == pytest.approx(edge, rel=1e-12)

    def test_classical_limit_in_total_variation(self, half_split):
        near = pmf_tv_distance(polya_table(50, half_split, 1e4), binomial_table(50, half_split))
        far = pmf_tv_distance(polya_table(50, half_split, 1.0), binomial_table(50, half_split))
        assert near < 0.05
        assert far > 0.5

    def test_approaches_binomial_as_volume_grows(self, half_split):
        binomial = binomial_table(50, half_split)
        distances = [pmf_tv_distance(polya_table(50, half_split, S), binomial)
                     for S in (10.0, 1e2, 1e3, 1e4)]
        assert all(later < earlier for earlier, later in zip(distances, distances[1:]))

    @pytest.mark.parametrize('n,alpha,S', [(2, 0.3, 1.0), (7, 0.55, 0.2), (25, 0.8, 13.0),
                                           (50, 0.1, 1e3)])
    def test_swapping_the_halves_mirrors_the_row(self, n, alpha, S):
        split = SplitSpec.from_alpha(alpha)
        for k in range(n + 1):
            assert polya_pmf(k, n, split, S) == pytest.approx(
                polya_pmf(n - k, n, split.swapped(), S), abs=1e-13)

    def test_bunching_ratio(self, half_split):
        assert bunching_ratio(half_split, 1.0) == pytest.approx(1.5)
        assert bunching_ratio(half_split, 1e9) == pytest.approx(1.0, abs=1e-8)


class TestConvolutionIdentities:

    def test_poisson_binomial_theorem(self):
        assert verify_convolution(StatModel.poisson(0.8), 1.3, 2.7, 100) < 1e-10

    def test_be_vandermonde(self):
        assert verify_convolution(StatModel.bose_einstein(1.5), 0.6, 1.9, 100) < 1e-10

    def test_glauber_satisfies_convolution(self):
        model = StatModel.glauber(1.0, 1.0)
        assert verify_convolution(model, 0.5, 0.5, 40) < 1e-10

    def test_mismatched_model_is_detected(self):
        residual = verify_convolution(StatModel.bose_einstein(1.5), 0.6, 1.9, 100,
                                      model_b=StatModel.bose_einstein(0.5))
        assert residual > 1e-6

    def test_deep_tail_uses_log_space(self):
        assert verify_convolution(StatModel.poisson(1.0), 0.5, 0.5, 200) < 1e-10

    def test_vandermonde_examples(self):
        assert verify_vandermonde(0.5, 0.5, 50) < 1e-11
        assert verify_vandermonde(3.0, 3.0, 120) < 1e-11
        assert verify_vandermonde(100.0, 0.5, 300) < 1e-11

    def test_vandermonde_wrong_total(self):
        assert verify_vandermonde(0.5, 0.5, 50, total=1.01) > 1e-6

    def test_volume_objects_accepted(self, be_model):
        residual = verify_convolution(be_model, PhaseVolume(1.0), PhaseVolume(2.0), 30)
        assert residual < 1e-10
