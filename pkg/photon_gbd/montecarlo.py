"""
Monte Carlo oracles for the analytic photon-number laws.

Samplers take a numpy Generator built from an RngStream; a generator must stay
inside one thread.  Parallel runs give every shard its own stream id and merge
the shard histograms, which is associative and order independent.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from typing import Callable, Optional

import numpy as np
from scipy import stats

from config.settings import get_config
from photon_gbd.models import (
    DegeneracyParam, EmpiricalHist, PhaseVolume, RngStream, SplitSpec, StatFamily, StatModel
)
from photon_gbd.utils import (
    BudgetExhaustedError, NumericalError, ValidationError, require_count,
    require_nonnegative, require_positive, timing_decorator
)

logger = logging.getLogger(__name__)
config = get_config()


def sample_poisson(mean: float, rng: np.random.Generator, size=None):
    return rng.poisson(require_nonnegative(mean, 'mean'), size)


def sample_gamma(shape: float, scale: float, rng: np.random.Generator, size=None):
    """Gamma draws; shape < 1 is boosted to shape + 1 and corrected by U^(1/shape)"""
    shape = require_positive(shape, 'shape')
    scale = require_nonnegative(scale, 'scale')
    if shape < 1.0:
        boosted = rng.gamma(shape + 1.0, scale, size)
        return boosted * rng.random(size) ** (1.0 / shape)
    return rng.gamma(shape, scale, size)


def sample_negative_binomial(A, w, rng: np.random.Generator, size=None):
    """Bose-Einstein counts in volume A as a Gamma(A, w)-mixed Poisson"""
    cells = PhaseVolume.of(A).cells
    w = DegeneracyParam.of(w).w
    if w == 0:
        return np.zeros(size, dtype=np.int64) if size is not None else 0
    return rng.poisson(sample_gamma(cells, w, rng, size))


def sample_polya(n: int, split: SplitSpec, S, rng: np.random.Generator, size=None):
    """Beta-binomial draws: p ~ Beta(alpha S, beta S), k ~ Binomial(n, p)"""
    n = require_count(n, 'n')
    cells = PhaseVolume.of(S).cells
    p = rng.beta(split.alpha * cells, split.beta * cells, size)
    return rng.binomial(n, p)


def sample_model(model: StatModel, volume, rng: np.random.Generator, size=None):
    if model.family is StatFamily.POISSON:
        return sample_poisson(model.w * PhaseVolume.of(volume).cells, rng, size)
    if model.family is StatFamily.BOSE_EINSTEIN:
        return sample_negative_binomial(volume, model.w, rng, size)
    raise ValidationError(f"No sampler for {model.family.value} statistics")


def histogram(draws, minlength: int = 0) -> EmpiricalHist:
    return EmpiricalHist(np.bincount(np.ravel(draws).astype(np.int64), minlength=minlength))


def empirical_gbd(model: StatModel, A, B, n: int, rng: np.random.Generator,
                  target: Optional[int] = None, budget: Optional[int] = None,
                  batch: Optional[int] = None) -> EmpiricalHist:
    """Histogram of X given X + Y = n, X ~ p(A) and Y ~ p(B) independent.

    Draws batches until target pairs are accepted; raises BudgetExhaustedError
    when the raw-draw budget runs out first.
    """
    n = require_count(n, 'n')
    target = config.MC_TARGET_ACCEPTED if target is None else require_count(target, 'target')
    budget = config.MC_DRAW_BUDGET if budget is None else require_count(budget, 'budget')
    batch = config.MC_BATCH_SIZE if batch is None else require_count(batch, 'batch')
    if model.family is StatFamily.GLAUBER:
        raise ValidationError("Conditional sampling supports Poisson and Bose-Einstein models")

    counts = np.zeros(n + 1, dtype=np.int64)
    accepted = 0
    attempts = 0
    while accepted < target and attempts < budget:
        size = int(min(batch, budget - attempts))
        x = sample_model(model, A, rng, size)
        y = sample_model(model, B, rng, size)
        kept = x[x + y == n]
        counts += np.bincount(kept, minlength=n + 1)
        accepted += kept.size
        attempts += size
    if accepted < target:
        raise BudgetExhaustedError(
            f"Accepted {accepted} of {target} samples for n={n} within {attempts} draws",
            accepted=accepted, attempts=attempts)
    logger.debug(f"empirical GBD n={n}: {accepted} accepted of {attempts} draws")
    return EmpiricalHist(counts, attempts)


@timing_decorator
def run_sharded(task: Callable[[np.random.Generator, int], EmpiricalHist], seed: int,
                total: int, shards: Optional[int] = None,
                workers: Optional[int] = None) -> EmpiricalHist:
    """Split total work units over stream ids 0..shards-1 and merge the histograms"""
    shards = config.MC_SHARDS if shards is None else max(1, require_count(shards, 'shards'))
    total = require_count(total, 'total')
    sizes = [total // shards + (1 if i < total % shards else 0) for i in range(shards)]
    streams = [RngStream(seed, i) for i in range(shards)]

    def work(index: int) -> EmpiricalHist:
        return task(streams[index].generator(), sizes[index])

    with ThreadPoolExecutor(max_workers=workers or config.MC_WORKERS) as pool:
        parts = list(pool.map(work, range(shards)))
    return reduce(EmpiricalHist.merge, parts)


def _reference(p):
    for attr in ('probs', 'w_values'):
        if hasattr(p, attr):
            return np.asarray(getattr(p, attr), dtype=float)
    return np.asarray(p, dtype=float)


def tv_distance(h: EmpiricalHist, p) -> float:
    """Half the L1 distance between histogram frequencies and the listed probabilities.

    Mass beyond a truncated table is not added; callers report its tail bound
    separately.
    """
    probs = _reference(p)
    freqs = h.frequencies
    size = max(freqs.size, probs.size)
    freqs = np.pad(freqs, (0, size - freqs.size))
    probs = np.pad(probs, (0, size - probs.size))
    return 0.5 * float(np.abs(freqs - probs).sum())


def chi_square_pvalue(h: EmpiricalHist, p) -> float:
    """Pearson chi-square p-value, pooling adjacent bins with expected count < 5"""
    probs = _reference(p)
    total = h.total
    if total == 0:
        raise NumericalError("chi-square test on an empty histogram")
    observed = np.pad(h.counts.astype(float), (0, max(0, probs.size - h.counts.size)))
    obs_bins = list(observed[:probs.size]) + [observed[probs.size:].sum()]
    exp_bins = list(total * probs) + [total * max(0.0, 1.0 - probs.sum())]

    pooled_obs, pooled_exp = [], []
    acc_obs = acc_exp = 0.0
    for o, e in zip(obs_bins, exp_bins):
        acc_obs += o
        acc_exp += e
        if acc_exp >= 5.0:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if pooled_exp:
        pooled_obs[-1] += acc_obs
        pooled_exp[-1] += acc_exp
    if len(pooled_exp) < 2:
        raise NumericalError("chi-square test is degenerate: all mass pooled into one bin")

    obs = np.array(pooled_obs)
    exp = np.array(pooled_exp)
    exp *= obs.sum() / exp.sum()
    return float(stats.chisquare(obs, exp).pvalue)
