"""
Photon-number distributions and the generalized binomial distribution (GBD).

All probabilities are evaluated in log space through log-gamma and
exponentiated last.  A volume is a PhaseVolume or a positive float in units of
coherence volume; for Glauber statistics the volume is the sampling time tau.
"""
import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from config.settings import get_config
from photon_gbd.models import (
    DegeneracyParam, GbdTable, GlauberParams, PhaseVolume, PmfTable, SplitSpec,
    StatFamily, StatModel
)
from photon_gbd.series import glauber_series
from photon_gbd.utils import (
    DegenerateDenominatorError, DomainError, NumericalError, ValidationError,
    require_count, require_nonnegative, require_positive
)

logger = logging.getLogger(__name__)
config = get_config()

VolumeLike = Union[PhaseVolume, float]


def log_rising_factorials(x: float, k_max: int) -> np.ndarray:
    """log x^(rising k) for every k = 0..k_max"""
    k_max = require_count(k_max, 'k')
    x = float(x)
    if k_max == 0:
        if not (math.isfinite(x) and x >= 0):
            raise DomainError(f"rising factorial needs x >= 0, got: {x}")
        return np.zeros(1)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"rising factorial of order {k_max} needs x > 0, got: {x}")
    direct = min(k_max, config.RISING_FACTORIAL_DIRECT_LIMIT)
    out = np.empty(k_max + 1)
    out[0] = 0.0
    out[1:direct + 1] = np.cumsum(np.log(x + np.arange(direct)))
    if k_max > direct:
        ks = np.arange(direct + 1, k_max + 1)
        out[direct + 1:] = gammaln(x + ks) - gammaln(x)
    return out


def log_rising_factorial(x: float, k: int) -> float:
    """log(x (x+1) ... (x+k-1))"""
    k = require_count(k, 'k')
    return float(log_rising_factorials(x, k)[k])


def _log_factorials(k_max: int) -> np.ndarray:
    return gammaln(np.arange(k_max + 1) + 1.0)


def _poisson_log_table(mean: float, k_max: int) -> np.ndarray:
    ks = np.arange(k_max + 1)
    return xlogy(ks, mean) - mean - _log_factorials(k_max)


def _be_log_table(A: float, w: float, k_max: int) -> np.ndarray:
    if w == 0:
        out = np.full(k_max + 1, -np.inf)
        out[0] = 0.0
        return out
    ks = np.arange(k_max + 1)
    return (log_rising_factorials(A, k_max) - _log_factorials(k_max)
            + ks * math.log(w) - (ks + A) * math.log1p(w))


def _glauber_log_table(model: StatModel, tau: float, k_max: int) -> np.ndarray:
    params = GlauberParams(model.gamma, model.photon_rate, tau)
    coeffs = glauber_series(params, k_max).coeffs
    with np.errstate(divide='ignore'):
        return np.log(np.clip(coeffs, 0.0, None))


def log_pmf_table(model: StatModel, volume: VolumeLike, k_max: int) -> np.ndarray:
    """log p_k(volume) for k = 0..k_max"""
    cells = PhaseVolume.of(volume).cells
    k_max = require_count(k_max, 'k_max')
    if model.family is StatFamily.POISSON:
        return _poisson_log_table(model.w * cells, k_max)
    if model.family is StatFamily.BOSE_EINSTEIN:
        return _be_log_table(cells, model.w, k_max)
    return _glauber_log_table(model, cells, k_max)


def log_pmf(model: StatModel, k: int, volume: VolumeLike) -> float:
    k = require_count(k, 'k')
    cells = PhaseVolume.of(volume).cells
    if model.family is StatFamily.POISSON:
        mean = model.w * cells
        return float(xlogy(k, mean) - mean - gammaln(k + 1.0))
    if model.family is StatFamily.BOSE_EINSTEIN:
        w = model.w
        if w == 0:
            return 0.0 if k == 0 else -math.inf
        return float(log_rising_factorial(cells, k) - gammaln(k + 1.0)
                     + k * math.log(w) - (k + cells) * math.log1p(w))
    return float(_glauber_log_table(model, cells, k)[k])


def pmf(model: StatModel, k: int, volume: VolumeLike) -> float:
    return math.exp(log_pmf(model, k, volume))


def poisson_pmf(k: int, volume: VolumeLike, density: float) -> float:
    """(wA)^k e^(-wA) / k!"""
    return pmf(StatModel.poisson(require_nonnegative(density, 'density')), k, volume)


def be_pmf(k: int, volume: VolumeLike, w: Union[DegeneracyParam, float]) -> float:
    """Mandel's formula A^(rising k)/k! w^k/(1+w)^(k+A), valid for non-integer A"""
    return pmf(StatModel.bose_einstein(w), k, volume)


def degeneracy_from_temperature(frequency: float, temperature: float) -> DegeneracyParam:
    """Mean photons per cell of blackbody radiation, 1/(e^(h nu / kT) - 1)"""
    frequency = require_positive(frequency, 'frequency')
    temperature = require_positive(temperature, 'temperature')
    exponent = (config.PLANCK_CONSTANT * frequency) / (config.BOLTZMANN_CONSTANT * temperature)
    if exponent > config.DEGENERACY_OVERFLOW_EXPONENT:
        return DegeneracyParam(0.0)
    return DegeneracyParam(1.0 / math.expm1(exponent))


def split_probabilities(A: VolumeLike, B: VolumeLike) -> SplitSpec:
    """alpha = A/(A+B), beta = B/(A+B)"""
    a = PhaseVolume.of(A).cells
    b = PhaseVolume.of(B).cells
    return SplitSpec(a / (a + b), b / (a + b))


def _is_vacuum(model: StatModel) -> bool:
    if model.family is StatFamily.GLAUBER:
        return model.photon_rate == 0
    return model.w == 0


def _ratio_bounds(model: StatModel, cells: float, ks: np.ndarray) -> np.ndarray:
    """Upper bound on p_{j+1}/p_j valid for every j > k"""
    if model.family is StatFamily.POISSON:
        return model.w * cells / (ks + 2.0)
    q = model.w / (1.0 + model.w)
    return q * np.maximum((cells + ks + 1.0) / (ks + 2.0), 1.0)


def _finish_table(probs: np.ndarray, certified: float) -> PmfTable:
    complement = max(0.0, 1.0 - math.fsum(probs)) + probs.size * np.finfo(float).eps
    return PmfTable(probs, min(certified, complement))


def pmf_table(model: StatModel, volume: VolumeLike, k_max: Optional[int] = None,
              target: Optional[float] = None) -> PmfTable:
    """p_0..p_K with a certified tail bound.

    With k_max given the table stops there.  Otherwise K grows until the tail
    bound drops below target: ratio bounds p_{j+1}/p_j for Poisson and BE, and
    the exact complement 1 - sum for Glauber, whose generating function is 1 at z = 1.
    """
    volume = PhaseVolume.of(volume)
    target = config.TAIL_BOUND_TARGET if target is None else float(target)
    glauber = model.family is StatFamily.GLAUBER

    if k_max is not None:
        k_max = require_count(k_max, 'k_max')
        log_p = log_pmf_table(model, volume, k_max + 1)
        probs = np.exp(log_p[:k_max + 1])
        certified = math.inf
        if not glauber:
            ratio = float(_ratio_bounds(model, volume.cells, np.array([k_max]))[0])
            if ratio < 1:
                certified = math.exp(log_p[k_max + 1]) / (1.0 - ratio)
        return _finish_table(probs, certified)

    if _is_vacuum(model):
        return PmfTable(np.ones(1), 0.0)

    K = config.SERIES_ORDER if glauber else 16
    while K <= config.PMF_K_LIMIT:
        log_p = log_pmf_table(model, volume, K + 1)
        if glauber:
            probs = np.exp(log_p[:K + 1])
            complement = 1.0 - math.fsum(probs)
            if complement < target:
                logger.debug(f"Glauber table truncated at K={K}, complement {complement:.3e}")
                return PmfTable(probs, max(complement, 0.0))
        else:
            ratio = _ratio_bounds(model, volume.cells, np.arange(K + 1))
            with np.errstate(divide='ignore'):
                bounds = np.where(ratio < 1, np.exp(log_p[1:]) / (1.0 - ratio), np.inf)
            hits = np.flatnonzero(bounds < target)
            if hits.size:
                cut = int(hits[0])
                logger.debug(f"{model.family.value} table truncated at K={cut}, "
                             f"tail bound {bounds[cut]:.3e}")
                return _finish_table(np.exp(log_p[:cut + 1]), float(bounds[cut]))
        K *= 2
    raise NumericalError(
        f"No truncation with tail below {target} within k <= {config.PMF_K_LIMIT} "
        f"for {model.describe()} at volume {volume.cells}")


def _check_denominator(log_den: float, n: int) -> None:
    if not log_den > config.GBD_LOG_DENOMINATOR_FLOOR:
        logger.warning(f"p_{n}(A+B) is degenerate (log = {log_den})")
        raise DegenerateDenominatorError(
            f"p_{n}(A+B) underflows (log p = {log_den}); use the closed-form Polya path")


def _check_k(k: int, n: int):
    k = require_count(k, 'k')
    n = require_count(n, 'n')
    if k > n:
        raise ValidationError(f"k must not exceed n, got k={k}, n={n}")
    return k, n


def gbd(k: int, n: int, model: StatModel, A: VolumeLike, B: VolumeLike) -> float:
    """W(k, n-k) = p_k(A) p_{n-k}(B) / p_n(A+B)"""
    k, n = _check_k(k, n)
    A, B = PhaseVolume.of(A), PhaseVolume.of(B)
    log_den = log_pmf(model, n, A + B)
    _check_denominator(log_den, n)
    log_w = log_pmf(model, k, A) + log_pmf(model, n - k, B) - log_den
    return min(1.0, math.exp(log_w))


def gbd_row(n: int, log_a: np.ndarray, log_b: np.ndarray, log_den: float) -> np.ndarray:
    """W(k, n-k) for k = 0..n from precomputed log pmf tables"""
    _check_denominator(log_den, n)
    ks = np.arange(n + 1)
    return np.minimum(1.0, np.exp(log_a[ks] + log_b[n - ks] - log_den))


def gbd_table(n: int, model: StatModel, A: VolumeLike, B: VolumeLike) -> GbdTable:
    n = require_count(n, 'n')
    A, B = PhaseVolume.of(A), PhaseVolume.of(B)
    log_a = log_pmf_table(model, A, n)
    log_b = log_pmf_table(model, B, n)
    log_den = log_pmf(model, n, A + B)
    return GbdTable(n, gbd_row(n, log_a, log_b, log_den))


def binomial_pmf(k: int, n: int, split: SplitSpec) -> float:
    """C(n,k) alpha^k beta^(n-k)"""
    k, n = _check_k(k, n)
    log_c = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    return float(np.exp(log_c + k * math.log(split.alpha) + (n - k) * math.log(split.beta)))


def binomial_table(n: int, split: SplitSpec) -> GbdTable:
    n = require_count(n, 'n')
    ks = np.arange(n + 1)
    log_f = _log_factorials(n)
    log_w = (log_f[n] - log_f[ks] - log_f[n - ks]
             + ks * math.log(split.alpha) + (n - ks) * math.log(split.beta))
    return GbdTable(n, np.exp(log_w))


def polya_pmf(k: int, n: int, split: SplitSpec, S: VolumeLike) -> float:
    """(alpha S)^(rising k)/k! (beta S)^(rising n-k)/(n-k)! n!/S^(rising n)"""
    k, n = _check_k(k, n)
    cells = PhaseVolume.of(S).cells
    log_w = (log_rising_factorial(split.alpha * cells, k) - gammaln(k + 1.0)
             + log_rising_factorial(split.beta * cells, n - k) - gammaln(n - k + 1.0)
             + gammaln(n + 1.0) - log_rising_factorial(cells, n))
    return min(1.0, math.exp(log_w))


def polya_table(n: int, split: SplitSpec, S: VolumeLike) -> GbdTable:
    n = require_count(n, 'n')
    cells = PhaseVolume.of(S).cells
    ks = np.arange(n + 1)
    log_f = _log_factorials(n)
    log_a = log_rising_factorials(split.alpha * cells, n) - log_f
    log_b = log_rising_factorials(split.beta * cells, n) - log_f
    log_w = log_a[ks] + log_b[n - ks] + log_f[n] - log_rising_factorial(cells, n)
    return GbdTable(n, np.minimum(1.0, np.exp(log_w)))


def one_photon_table(split: SplitSpec, S: VolumeLike) -> GbdTable:
    """W(0,1) = beta, W(1,0) = alpha whatever the volume"""
    PhaseVolume.of(S)
    return GbdTable(1, [split.beta, split.alpha])


def two_photon_table(split: SplitSpec, S: VolumeLike) -> GbdTable:
    s = PhaseVolume.of(S).cells
    a, b = split.alpha, split.beta
    return GbdTable(2, [
        b * (b * s + 1.0) / (s + 1.0),
        2.0 * a * b * s / (s + 1.0),
        a * (a * s + 1.0) / (s + 1.0),
    ])


def three_photon_table(split: SplitSpec, S: VolumeLike) -> GbdTable:
    s = PhaseVolume.of(S).cells
    a, b = split.alpha, split.beta
    den = (s + 1.0) * (s + 2.0)
    return GbdTable(3, [
        b * (b * s + 1.0) * (b * s + 2.0) / den,
        3.0 * a * b * s * (b * s + 1.0) / den,
        3.0 * a * b * s * (a * s + 1.0) / den,
        a * (a * s + 1.0) * (a * s + 2.0) / den,
    ])


def bunching_ratio(split: SplitSpec, S: VolumeLike) -> float:
    """W(2,0) / alpha^2: excess probability of both photons in part A"""
    return two_photon_table(split, S)[2] / split.alpha ** 2


def _as_vector(p) -> np.ndarray:
    for attr in ('probs', 'w_values'):
        if hasattr(p, attr):
            return np.asarray(getattr(p, attr), dtype=float)
    return np.asarray(p, dtype=float)


def pmf_tv_distance(p, q) -> float:
    """Total-variation distance between two laws over their tabulated support"""
    p, q = _as_vector(p), _as_vector(q)
    size = max(p.size, q.size)
    p = np.pad(p, (0, size - p.size))
    q = np.pad(q, (0, size - q.size))
    return 0.5 * float(np.abs(p - q).sum())


def verify_convolution(model: StatModel, A: VolumeLike, B: VolumeLike, n_max: int,
                       model_b: Optional[StatModel] = None) -> float:
    """Max relative residual of p_n(A+B) against sum_k p_k(A) p_{n-k}(B), n <= n_max.

    model_b replaces the statistics used in B (negative controls).  Below the
    linear floor the comparison is made in log space.
    """
    n_max = require_count(n_max, 'n_max')
    A, B = PhaseVolume.of(A), PhaseVolume.of(B)
    log_a = log_pmf_table(model, A, n_max)
    log_b = log_pmf_table(model_b or model, B, n_max)
    log_s = log_pmf_table(model, A + B, n_max)
    convolved = np.convolve(np.exp(log_a), np.exp(log_b))[:n_max + 1]

    worst = 0.0
    for n in range(n_max + 1):
        lhs = math.exp(log_s[n])
        if lhs >= config.LINEAR_FLOOR:
            residual = abs(lhs - convolved[n]) / lhs
        else:
            ks = np.arange(n + 1)
            with np.errstate(divide='ignore'):
                log_rhs = float(logsumexp(log_a[ks] + log_b[n - ks]))
            if math.isinf(log_rhs) and math.isinf(log_s[n]):
                residual = 0.0
            elif math.isinf(log_rhs) or math.isinf(log_s[n]):
                residual = math.inf
            else:
                residual = abs(math.expm1(log_rhs - log_s[n]))
        worst = max(worst, residual)
    return worst


def verify_vandermonde(A: float, B: float, n: int, total: Optional[float] = None) -> float:
    """|1 - n!/(A+B)^(rising n) sum_k A^(rising k) B^(rising n-k) / (k!(n-k)!)|

    total overrides A + B on the left-hand side (negative controls).
    """
    A = require_positive(A, 'A')
    B = require_positive(B, 'B')
    total = A + B if total is None else require_positive(total, 'total')
    n = require_count(n, 'n')
    ks = np.arange(n + 1)
    log_f = _log_factorials(n)
    log_a = log_rising_factorials(A, n) - log_f
    log_b = log_rising_factorials(B, n) - log_f
    log_rhs = float(logsumexp(log_a[ks] + log_b[n - ks]))
    log_lhs = log_rising_factorial(total, n) - log_f[n]
    return abs(math.expm1(log_rhs - log_lhs))
