"""
Verification suites behind the `verify` command.

Each suite sweeps a fixed parameter grid, records one residual per check and
compares the worst residual with the suite tolerance.  With fault=True every
suite deliberately breaks its own identity; a healthy build must then fail.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.special import gammaln, xlogy

from photon_gbd.distributions import (
    be_pmf, pmf_table, verify_convolution, verify_vandermonde
)
from photon_gbd.models import (
    BeamState, DeviceKind, GlauberParams, PhaseVolume, SeriesPoly, SplitDevice, StatModel
)
from photon_gbd.scenarios import cascade, transmitted_marginal
from photon_gbd.series import (
    glauber_exponent, glauber_pmf, rising_factorial_gf, series_add, series_identity,
    series_mul, series_rescale, series_scale, verify_gf_multiplicativity,
    verify_rising_factorial_gf
)
from photon_gbd.utils import ValidationError, json_number, timing_decorator

logger = logging.getLogger(__name__)

SUITES = ('convolution', 'vandermonde', 'gf', 'marginal')

CONVOLUTION_VOLUMES = (0.5, 1.0, 2.7, 10.0)
CONVOLUTION_W = (0.3, 1.0, 3.0)
CONVOLUTION_N_MAX = 200
CONVOLUTION_TOLERANCE = 1e-10

VANDERMONDE_VOLUMES = (0.5, 1.0, 2.5, 7.0, 100.0)
VANDERMONDE_N_MAX = 300
VANDERMONDE_TOLERANCE = 1e-11

RISING_GF_ORDER = 100
RISING_GF_TOLERANCE = 1e-11
GLAUBER_GRID = (0.1, 1.0, 10.0)
POISSON_LIMIT_GRID = (0.1, 1.0)
GLAUBER_ORDER = 60
GLAUBER_TOLERANCE = 1e-10
GLAUBER_P0_TOLERANCE = 1e-12
POISSON_LIMIT_GAMMA = 1e6
POISSON_LIMIT_TOLERANCE = 1e-6
BE_GF_ORDER = 60
BE_GF_TOLERANCE = 1e-11

MARGINAL_VOLUMES = (0.5, 2.0, 10.0)
MARGINAL_W = (0.3, 1.0, 3.0)
MARGINAL_ALPHAS = (0.25, 0.5, 0.75)
MARGINAL_CASCADE = (0.6, 0.5)
MARGINAL_TOLERANCE = 1e-10

FAULT_W_FACTOR = 1.5
FAULT_OFFSET = 0.01


@dataclass
class SuiteResult:
    """Worst residual of one suite against its tolerance"""
    name: str
    checks: List[Dict[str, Any]] = field(default_factory=list)

    def record(self, check: str, residual: float, tolerance: float, **parameters) -> None:
        self.checks.append({
            'check': check,
            'parameters': parameters,
            'residual': float(residual),
            'tolerance': tolerance,
            'passed': bool(residual <= tolerance),
        })

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c['passed'] for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c['residual'] for c in self.checks), default=math.nan)

    def worst(self) -> Dict[str, Any]:
        """Check with the largest residual relative to its tolerance"""
        def excess(check: Dict[str, Any]) -> float:
            if check['tolerance'] > 0:
                return check['residual'] / check['tolerance']
            return math.inf if check['residual'] > 0 else 0.0

        return max(self.checks, key=excess)

    def to_dict(self, detail: bool = False) -> Dict[str, Any]:
        result = {
            'suite': self.name,
            'passed': self.passed,
            'checks': len(self.checks),
            'failed': sum(1 for c in self.checks if not c['passed']),
            'max_residual': json_number(self.max_residual),
        }
        if self.checks:
            worst = self.worst()
            result['worst'] = {**worst, 'residual': json_number(worst['residual'])}
        if detail:
            result['details'] = [{**c, 'residual': json_number(c['residual'])}
                                 for c in self.checks]
        return result


def _models(w: float) -> Sequence[StatModel]:
    return StatModel.poisson(w), StatModel.bose_einstein(w)


@timing_decorator
def convolution_suite(fault: bool = False) -> SuiteResult:
    """Convolution identity for Poisson and BE on the default volume grid"""
    result = SuiteResult('convolution')
    for w in CONVOLUTION_W:
        for model in _models(w):
            model_b = None
            if fault:
                model_b = StatModel(model.family, w * FAULT_W_FACTOR)
            for A, B in itertools.product(CONVOLUTION_VOLUMES, repeat=2):
                residual = verify_convolution(model, A, B, CONVOLUTION_N_MAX, model_b)
                result.record('convolution', residual, CONVOLUTION_TOLERANCE,
                              family=model.family.value, w=w, A=A, B=B,
                              n_max=CONVOLUTION_N_MAX)
    return result


@timing_decorator
def vandermonde_suite(fault: bool = False) -> SuiteResult:
    """Vandermonde identity for rising factorials, every n up to the grid limit"""
    result = SuiteResult('vandermonde')
    for A, B in itertools.product(VANDERMONDE_VOLUMES, repeat=2):
        total = A + B + FAULT_OFFSET if fault else None
        residual = max(verify_vandermonde(A, B, n, total)
                       for n in range(VANDERMONDE_N_MAX + 1))
        result.record('vandermonde', residual, VANDERMONDE_TOLERANCE,
                      A=A, B=B, n_max=VANDERMONDE_N_MAX)
    return result


def _linearised_glauber(params: GlauberParams, order: int) -> SeriesPoly:
    """1 + E in place of exp(E); not multiplicative in tau"""
    return series_add(series_identity(order), glauber_exponent(params, order))


def _glauber_p0(params: GlauberParams) -> float:
    gamma, rate, tau = params.gamma, params.photon_rate, params.tau
    return math.exp(-(math.sqrt(gamma * gamma + 2.0 * gamma * rate) - gamma) * tau)


def _poisson_table(mean: float, order: int) -> np.ndarray:
    ks = np.arange(order + 1)
    return np.exp(xlogy(ks, mean) - mean - gammaln(ks + 1.0))


@timing_decorator
def gf_suite(fault: bool = False) -> SuiteResult:
    """Generating-function identities: rising factorials, Glauber statistics, BE"""
    result = SuiteResult('gf')
    volumes = VANDERMONDE_VOLUMES[:-1]
    for A, B in itertools.product(volumes, repeat=2):
        if fault:
            product = series_mul(rising_factorial_gf(A, RISING_GF_ORDER),
                                 rising_factorial_gf(B, RISING_GF_ORDER))
            reference = rising_factorial_gf(A + B + FAULT_OFFSET, RISING_GF_ORDER)
            residual = float(np.max(np.abs(product.coeffs - reference.coeffs)
                                    / reference.coeffs))
        else:
            residual = verify_rising_factorial_gf(A, B, RISING_GF_ORDER)
        result.record('rising_factorial_gf', residual, RISING_GF_TOLERANCE,
                      A=A, B=B, order=RISING_GF_ORDER)

    build: Optional[Callable] = _linearised_glauber if fault else None
    for gamma, rate, tau in itertools.product(GLAUBER_GRID, repeat=3):
        params = GlauberParams(gamma, rate, tau)
        residual = verify_gf_multiplicativity(params, 0.4 * tau, 0.6 * tau, GLAUBER_ORDER, build)
        result.record('glauber_multiplicativity', residual, GLAUBER_TOLERANCE,
                      gamma=gamma, photon_rate=rate, tau=tau, order=GLAUBER_ORDER)

        p0 = glauber_pmf(params, GLAUBER_ORDER).probs[0]
        expected = _glauber_p0(params)
        if fault:
            expected *= 1.0 + FAULT_OFFSET
        result.record('glauber_p0', abs(p0 - expected), GLAUBER_P0_TOLERANCE,
                      gamma=gamma, photon_rate=rate, tau=tau)

    gamma = 1.0 if fault else POISSON_LIMIT_GAMMA
    for rate, tau in itertools.product(POISSON_LIMIT_GRID, repeat=2):
        probs = glauber_pmf(GlauberParams(gamma, rate, tau), GLAUBER_ORDER).probs
        residual = float(np.max(np.abs(probs - _poisson_table(rate * tau, GLAUBER_ORDER))))
        result.record('glauber_poisson_limit', residual, POISSON_LIMIT_TOLERANCE,
                      gamma=gamma, photon_rate=rate, tau=tau)

    for A, w in itertools.product(volumes, CONVOLUTION_W):
        w_used = w * FAULT_W_FACTOR if fault else w
        q = w_used / (1.0 + w_used)
        series = series_scale(series_rescale(rising_factorial_gf(A, BE_GF_ORDER), q),
                              (1.0 + w_used) ** (-A))
        expected = np.array([be_pmf(k, A, w) for k in range(BE_GF_ORDER + 1)])
        residual = float(np.max(np.abs(series.coeffs - expected) / expected))
        result.record('be_generating_function', residual, BE_GF_TOLERANCE,
                      A=A, w=w, order=BE_GF_ORDER)
    return result


@timing_decorator
def marginal_suite(fault: bool = False) -> SuiteResult:
    """Transmitted marginal equals the same statistics in alpha S, for every device kind"""
    result = SuiteResult('marginal')
    for S, w, alpha in itertools.product(MARGINAL_VOLUMES, MARGINAL_W, MARGINAL_ALPHAS):
        for model in _models(w):
            beam = BeamState(model, PhaseVolume(S))
            tables = [transmitted_marginal(beam, SplitDevice(kind, alpha)).probs
                      for kind in DeviceKind]
            identical = all(np.array_equal(tables[0], t) for t in tables[1:])
            result.record('device_kinds_identical', 0.0 if identical else math.inf, 0.0,
                          family=model.family.value, S=S, w=w, alpha=alpha)

            reference_alpha = alpha * (1.0 + FAULT_OFFSET) if fault else alpha
            marginal = tables[0]
            reference = pmf_table(model, reference_alpha * S, marginal.size - 1).probs
            residual = float(np.max(np.abs(marginal - reference)))
            result.record('transmitted_marginal', residual, MARGINAL_TOLERANCE,
                          family=model.family.value, S=S, w=w, alpha=alpha)

    first, second = (SplitDevice(DeviceKind.BEAMSPLITTER, a) for a in MARGINAL_CASCADE)
    combined = cascade(first, second)
    if fault:
        combined = SplitDevice(combined.kind, combined.transmittance * (1.0 + FAULT_OFFSET))
    for S, w in itertools.product(MARGINAL_VOLUMES, MARGINAL_W):
        beam = BeamState(StatModel.bose_einstein(w), PhaseVolume(S))
        through_first = transmitted_marginal(beam, first).probs
        # the first stage output has BE statistics in alpha1 S
        staged = BeamState(beam.model, PhaseVolume(first.transmittance * S))
        two_stage = transmitted_marginal(staged, second).probs
        single = transmitted_marginal(beam, combined).probs
        size = min(two_stage.size, single.size)
        residual = float(np.max(np.abs(two_stage[:size] - single[:size])))
        residual = max(residual, float(np.max(np.abs(
            through_first - pmf_table(beam.model, first.transmittance * S,
                                      through_first.size - 1).probs))))
        result.record('cascade', residual, MARGINAL_TOLERANCE,
                      S=S, w=w, alphas=list(MARGINAL_CASCADE))
    return result


def run_suite(name: str, fault: bool = False) -> SuiteResult:
    runners = {
        'convolution': convolution_suite,
        'vandermonde': vandermonde_suite,
        'gf': gf_suite,
        'marginal': marginal_suite,
    }
    if name not in runners:
        raise ValidationError(f"Unknown suite '{name}', expected one of {', '.join(SUITES)} or all")
    result = runners[name](fault=fault)
    log = logger.info if result.passed else logger.error
    log(f"Suite {name}: {'passed' if result.passed else 'FAILED'}, "
        f"max residual {result.max_residual:.3e} over {len(result.checks)} checks")
    return result


def run_suites(suite: str = 'all', fault: bool = False) -> List[SuiteResult]:
    names = SUITES if suite == 'all' else (suite,)
    return [run_suite(name, fault) for name in names]
