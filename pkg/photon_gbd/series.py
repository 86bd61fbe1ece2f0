"""
Truncated power-series arithmetic for probability generating functions.

A SeriesPoly of order N stands for the coefficients c_0..c_N of a generating
function in z.  Every operation here is exact truncation: coefficient k of a
result depends only on coefficients 0..k of the inputs, so computing at a higher
order never changes the lower coefficients.
"""
import logging
import math
from typing import Callable, Optional

import numpy as np

from config.settings import get_config
from photon_gbd.models import GlauberParams, PmfTable, SeriesPoly
from photon_gbd.utils import DomainError, NumericalError, require_count, require_positive

logger = logging.getLogger(__name__)
config = get_config()


def _promote(a: SeriesPoly, order: int) -> np.ndarray:
    """Coefficients of a at the given order, zero-padded as a polynomial"""
    coeffs = np.zeros(order + 1)
    size = min(a.coeffs.size, order + 1)
    coeffs[:size] = a.coeffs[:size]
    return coeffs


def series_identity(order: int) -> SeriesPoly:
    coeffs = np.zeros(require_count(order, 'order') + 1)
    coeffs[0] = 1.0
    return SeriesPoly(coeffs)


def series_zero(order: int) -> SeriesPoly:
    return SeriesPoly(np.zeros(require_count(order, 'order') + 1))


def series_add(a: SeriesPoly, b: SeriesPoly) -> SeriesPoly:
    order = max(a.order, b.order)
    return SeriesPoly(_promote(a, order) + _promote(b, order))


def series_scale(a: SeriesPoly, factor: float) -> SeriesPoly:
    return SeriesPoly(a.coeffs * float(factor))


def series_rescale(a: SeriesPoly, factor: float) -> SeriesPoly:
    """Substitute z -> factor * z"""
    return SeriesPoly(a.coeffs * float(factor) ** np.arange(a.coeffs.size))


def series_mul(a: SeriesPoly, b: SeriesPoly) -> SeriesPoly:
    """Cauchy product truncated at the larger of the two orders"""
    order = max(a.order, b.order)
    product = np.convolve(_promote(a, order), _promote(b, order))
    return SeriesPoly(product[:order + 1])


def series_sqrt(a: SeriesPoly) -> SeriesPoly:
    """Square root by the recurrence b_k = (a_k - sum_{j=1}^{k-1} b_j b_{k-j}) / (2 b_0)"""
    c = a.coeffs
    if not c[0] > 0:
        raise DomainError(f"series square root needs c_0 > 0, got: {c[0]}")
    b = np.zeros_like(c)
    b[0] = math.sqrt(c[0])
    for k in range(1, c.size):
        b[k] = (c[k] - np.dot(b[1:k], b[k - 1:0:-1])) / (2.0 * b[0])
    return SeriesPoly(b)


def series_exp(a: SeriesPoly) -> SeriesPoly:
    """Exponential by the recurrence b_k = (1/k) sum_{j=1}^{k} j a_j b_{k-j}"""
    c = a.coeffs
    b = np.zeros_like(c)
    b[0] = math.exp(c[0])
    weighted = np.arange(c.size) * c
    for k in range(1, c.size):
        b[k] = np.dot(weighted[1:k + 1], b[k - 1::-1]) / k
    return SeriesPoly(b)


def series_log(a: SeriesPoly) -> SeriesPoly:
    """Logarithm by the recurrence c_k = (a_k - (1/k) sum_{j=1}^{k-1} j c_j a_{k-j}) / a_0"""
    c = a.coeffs
    if not c[0] > 0:
        raise DomainError(f"series logarithm needs c_0 > 0, got: {c[0]}")
    out = np.zeros_like(c)
    out[0] = math.log(c[0])
    for k in range(1, c.size):
        weighted = np.arange(1, k) * out[1:k]
        out[k] = (c[k] - np.dot(weighted, c[k - 1:0:-1]) / k) / c[0]
    return SeriesPoly(out)


def rising_factorial_gf(A: float, order: int) -> SeriesPoly:
    """Expansion of 1/(1-z)^A: coefficient k is A^(rising k) / k!"""
    A = require_positive(A, 'A')
    order = require_count(order, 'order')
    ks = np.arange(1, order + 1)
    coeffs = np.concatenate(([1.0], np.cumprod((A + ks - 1) / ks)))
    return SeriesPoly(coeffs)


def verify_rising_factorial_gf(A: float, B: float, order: int) -> float:
    """Max relative coefficient residual of F(A) F(B) against F(A+B)"""
    product = series_mul(rising_factorial_gf(A, order), rising_factorial_gf(B, order))
    reference = rising_factorial_gf(A + B, order)
    return float(np.max(np.abs(product.coeffs - reference.coeffs) / reference.coeffs))


def glauber_exponent(params: GlauberParams, order: int) -> SeriesPoly:
    """-[(gamma^2 + 2 gamma W lambda)^(1/2) - gamma] tau with lambda = 1 - z"""
    x = 2.0 * params.photon_rate / params.gamma
    # gamma * [(1 + x - x z)^(1/2) - 1]
    root = series_sqrt(SeriesPoly(_promote(SeriesPoly([1.0 + x, -x]), order)))
    shifted = root.coeffs * params.gamma
    shifted[0] = params.gamma * x / (math.sqrt(1.0 + x) + 1.0)
    return SeriesPoly(-params.tau * shifted)


def glauber_series(params: GlauberParams, order: Optional[int] = None) -> SeriesPoly:
    """Raw (unclamped) photon-count probabilities of Lorentzian-line light"""
    order = config.SERIES_ORDER if order is None else require_count(order, 'order')
    if params.photon_rate == 0:
        return series_identity(order)
    return series_exp(glauber_exponent(params, order))


def glauber_pmf(params: GlauberParams, order: Optional[int] = None) -> PmfTable:
    """Glauber statistics p_0..p_N with tiny rounding negatives clamped to zero"""
    raw = glauber_series(params, order).coeffs
    negative = raw < 0
    if np.any(raw < -config.SERIES_CLAMP_TOLERANCE):
        raise NumericalError(
            f"Glauber expansion produced a coefficient of {raw.min()!r} for {params}")
    if np.any(negative):
        logger.warning(f"Clamping {int(negative.sum())} rounding negatives in Glauber series")
    probs = np.where(negative, 0.0, raw)
    return PmfTable(probs, max(0.0, 1.0 - math.fsum(probs)))


def verify_gf_multiplicativity(params: GlauberParams, tau1: float, tau2: float,
                               order: Optional[int] = None,
                               generating_function: Optional[Callable] = None) -> float:
    """Max coefficient residual of G(tau1 + tau2) against G(tau1) G(tau2)"""
    tau1 = require_positive(tau1, 'tau1')
    tau2 = require_positive(tau2, 'tau2')
    order = config.SERIES_ORDER if order is None else require_count(order, 'order')
    build = generating_function or glauber_series

    def at(tau: float) -> SeriesPoly:
        return build(GlauberParams(params.gamma, params.photon_rate, tau), order)

    product = series_mul(at(tau1), at(tau2))
    residual = float(np.max(np.abs(at(tau1 + tau2).coeffs - product.coeffs)))
    logger.debug(f"GF multiplicativity residual {residual:.3e} for {params}, "
                 f"tau1={tau1}, tau2={tau2}, order={order}")
    return residual
