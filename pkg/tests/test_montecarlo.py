"""
Tests for the Monte Carlo samplers and goodness-of-fit helpers
"""
import numpy as np
import pytest
from scipy import stats

from photon_gbd.distributions import pmf_table, polya_table
from photon_gbd.models import EmpiricalHist, RngStream, SplitSpec, StatModel
from photon_gbd.montecarlo import (
    chi_square_pvalue, empirical_gbd, histogram, run_sharded, sample_gamma,
    sample_model, sample_negative_binomial, sample_poisson, sample_polya, tv_distance
)
from photon_gbd.utils import BudgetExhaustedError, NumericalError, ValidationError


@pytest.fixture
def rng():
    return RngStream(42).generator()


def polya_task(n, split, S):
    def task(generator, size):
        return histogram(sample_polya(n, split, S, generator, size), minlength=n + 1)
    return task


class TestSamplers:

    def test_poisson_zero_mean(self, rng):
        draws = sample_poisson(0.0, rng, 1000)
        assert np.all(draws == 0)

    def test_gamma_boost_keeps_mean(self, rng):
        draws = sample_gamma(0.3, 2.0, rng, 200000)
        assert draws.mean() == pytest.approx(0.6, rel=0.02)
        assert np.all(draws >= 0)

    def test_negative_binomial_vacuum(self, rng):
        np.testing.assert_array_equal(sample_negative_binomial(1.0, 0.0, rng, 10),
                                      np.zeros(10))

    def test_be_single_cell_vacuum_probability(self, rng):
        draws = sample_negative_binomial(1.0, 1.0, rng, 1000000)
        assert np.mean(draws == 0) == pytest.approx(0.5, abs=0.002)

    def test_be_histogram_passes_chi_square(self, rng):
        model = StatModel.bose_einstein(0.8)
        hist = histogram(sample_model(model, 2.5, rng, 200000))
        assert chi_square_pvalue(hist, pmf_table(model, 2.5)) > 1e-3
        assert tv_distance(hist, pmf_table(model, 2.5)) < 0.01

    def test_polya_matches_beta_binomial(self, rng):
        split = SplitSpec.from_alpha(0.3)
        hist = histogram(sample_polya(10, split, 2.0, rng, 200000), minlength=11)
        oracle = stats.betabinom.pmf(np.arange(11), 10, 0.6, 1.4)
        assert chi_square_pvalue(hist, oracle) > 1e-3

    def test_glauber_has_no_direct_sampler(self, rng):
        with pytest.raises(ValidationError):
            sample_model(StatModel.glauber(1.0, 1.0), 1.0, rng, 10)


class TestConditionalSampling:

    def test_be_pairs_follow_polya_not_binomial(self, rng, be_model, half_split):
        hist = empirical_gbd(be_model, 0.5, 0.5, 2, rng, target=50000)
        assert hist.total >= 50000
        assert 0.0 < hist.acceptance_rate < 1.0
        assert tv_distance(hist, polya_table(2, half_split, 1.0)) < 0.01
        assert tv_distance(hist, [0.25, 0.5, 0.25]) > 0.2

    def test_budget_exhaustion_raises(self, rng, poisson_model):
        with pytest.raises(BudgetExhaustedError) as info:
            empirical_gbd(poisson_model, 0.5, 0.5, 30, rng, target=10, budget=1000, batch=100)
        assert info.value.attempts == 1000
        assert info.value.accepted < 10

    def test_glauber_rejected(self, rng):
        with pytest.raises(ValidationError):
            empirical_gbd(StatModel.glauber(1.0, 1.0), 0.5, 0.5, 2, rng, target=10)


class TestShardedRuns:

    def test_same_seed_same_histogram(self, half_split):
        task = polya_task(2, half_split, 1.0)
        first = run_sharded(task, 42, 20000, shards=4, workers=4)
        again = run_sharded(task, 42, 20000, shards=4, workers=1)
        np.testing.assert_array_equal(first.counts, again.counts)
        assert first.total == 20000

    def test_different_seed_differs(self, half_split):
        task = polya_task(2, half_split, 1.0)
        first = run_sharded(task, 42, 20000, shards=2)
        other = run_sharded(task, 43, 20000, shards=2)
        assert not np.array_equal(first.counts, other.counts)

    def test_uneven_split_covers_total(self, half_split):
        hist = run_sharded(polya_task(2, half_split, 1.0), 7, 1003, shards=4)
        assert hist.total == 1003


class TestGoodnessOfFit:

    def test_tv_distance_exact_match(self):
        hist = EmpiricalHist([25, 50, 25])
        assert tv_distance(hist, [0.25, 0.5, 0.25]) == pytest.approx(0.0)

    def test_tv_distance_counts_unlisted_mass(self):
        hist = EmpiricalHist([50, 50, 0, 100])
        assert tv_distance(hist, [0.5, 0.5]) == pytest.approx(0.5)

    def test_tv_distance_ignores_truncated_tail(self, be_model):
        # probs [0.5, 0.25] with tail bound 0.25
        table = pmf_table(be_model, 1.0, 1)
        assert table.tail_bound == pytest.approx(0.25)
        assert tv_distance(EmpiricalHist([1, 1]), table) == pytest.approx(0.125)

    def test_chi_square_rejects_wrong_law(self):
        hist = EmpiricalHist([5000, 5000])
        assert chi_square_pvalue(hist, [0.3, 0.7]) < 1e-6

    def test_chi_square_degenerate(self):
        with pytest.raises(NumericalError):
            chi_square_pvalue(EmpiricalHist([100]), [1.0])
        with pytest.raises(NumericalError):
            chi_square_pvalue(EmpiricalHist([0, 0]), [0.5, 0.5])


class TestSamplerAccuracy:
    """Million-draw histograms against the closed forms"""

    M = 1000000

    @pytest.mark.parametrize('n,alpha,S', [
        (1, 0.3, 5.0), (2, 0.5, 1.0), (50, 0.5, 1e4), (10, 0.2, 0.3), (25, 0.7, 3.0),
    ])
    def test_polya_sampler(self, rng, n, alpha, S):
        split = SplitSpec.from_alpha(alpha)
        hist = histogram(sample_polya(n, split, S, rng, self.M), minlength=n + 1)
        assert tv_distance(hist, polya_table(n, split, S)) < 0.005

    @pytest.mark.parametrize('mean', [0.5, 5.0, 40.0])
    def test_poisson_sampler(self, rng, mean):
        model = StatModel.poisson(mean)
        hist = histogram(sample_model(model, 1.0, rng, self.M))
        assert tv_distance(hist, pmf_table(model, 1.0)) < 3 / np.sqrt(self.M) + 0.002

    @pytest.mark.parametrize('A,w', [(0.3, 2.0), (2.0, 0.5), (10.0, 1.0)])
    def test_negative_binomial_sampler(self, rng, A, w):
        hist = histogram(sample_negative_binomial(A, w, rng, self.M))
        reference = pmf_table(StatModel.bose_einstein(w), A)
        assert tv_distance(hist, reference) < 3 / np.sqrt(self.M) + 0.002

    @pytest.mark.parametrize('n,S', [(2, 1.0), (3, 2.0), (10, 5.0)])
    def test_be_pairs_pass_chi_square_against_polya(self, rng, be_model, half_split, n, S):
        hist = empirical_gbd(be_model, S / 2, S / 2, n, rng, target=100000)
        assert hist.total >= 100000
        assert chi_square_pvalue(hist, polya_table(n, half_split, S)) > 1e-3
