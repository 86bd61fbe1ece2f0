"""
Command operations shared by the CLI and the HTTP API.

Every cmd_* function validates its inputs, runs the computation and returns a
RunReport; rendering and exit codes are left to the caller.
"""
import logging
import os
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from config.settings import get_config
from photon_gbd.distributions import (
    binomial_table, gbd_table, pmf_table, pmf_tv_distance, polya_table, split_probabilities
)
from photon_gbd.figures import build_figure, check_figure
from photon_gbd.models import (
    BeamState, DeviceKind, EmpiricalHist, RngStream, RunReport,
    SplitDevice, SplitSpec, StatFamily, StatModel
)
from photon_gbd.montecarlo import (
    chi_square_pvalue, empirical_gbd, histogram, run_sharded, sample_model, sample_polya,
    tv_distance
)
from photon_gbd.scenarios import cascade, joint_output_distribution
from photon_gbd.utils import (
    NumericalError, ValidationError, require_count
)
from photon_gbd.verification import run_suites

logger = logging.getLogger(__name__)
config = get_config()

MODELS = tuple(family.value for family in StatFamily)
SAMPLE_TARGETS = ('polya', 'poisson', 'be', 'gbd')
SCENARIO_TOLERANCE = 1e-10


def _require(values: Dict[str, Any], names: Sequence[str]) -> None:
    missing = [name for name in names if values.get(name) is None]
    if missing:
        raise ValidationError(f"Missing required fields: {', '.join(missing)}")


def resolve_seed(seed: Optional[int] = None) -> int:
    """Seed precedence: explicit value, then the environment, then the default"""
    if seed is not None:
        return int(seed)
    env_seed = os.environ.get(config.SEED_ENV_VAR)
    if env_seed:
        try:
            return int(env_seed)
        except ValueError:
            raise ValidationError(f"{config.SEED_ENV_VAR} must be an integer, got: {env_seed}")
    return config.DEFAULT_SEED


def build_model(model: str, w: Optional[float] = None, gamma: Optional[float] = None,
                photon_rate: Optional[float] = None) -> StatModel:
    if model not in MODELS:
        raise ValidationError(f"Unknown model '{model}', expected one of {', '.join(MODELS)}")
    if model == StatFamily.GLAUBER.value:
        _require({'gamma': gamma, 'photon_rate': photon_rate}, ('gamma', 'photon_rate'))
        return StatModel.glauber(gamma, photon_rate)
    _require({'w': w}, ('w',))
    return StatModel(StatFamily(model), w=w)


def _timed(build: Callable[[], RunReport], timing: bool) -> RunReport:
    start = time.perf_counter()
    report = build()
    if timing:
        report.wall_time = time.perf_counter() - start
    return report


def cmd_pmf(model: str, volume: Optional[float] = None, w: Optional[float] = None,
            gamma: Optional[float] = None, photon_rate: Optional[float] = None,
            tau: Optional[float] = None, k_max: Optional[int] = None,
            timing: bool = False) -> RunReport:
    """Photon-count distribution p_k of one model in one volume"""
    stat = build_model(model, w, gamma, photon_rate)
    if stat.family is StatFamily.GLAUBER and tau is not None:
        volume = tau
    _require({'volume': volume}, ('volume',))

    def build() -> RunReport:
        table = pmf_table(stat, volume, k_max)
        parameters = {**stat.describe(), 'volume': volume, 'kmax': k_max}
        rows = [{'k': k, 'p_k': float(p)} for k, p in enumerate(table.probs)]
        logger.info(f"pmf {stat.family.value}: {table.k_max + 1} rows, "
                    f"tail bound {table.tail_bound:.3e}")
        return RunReport('pmf', parameters, rows, checks={
            'k_max': table.k_max,
            'total': table.total,
            'tail_bound': table.tail_bound,
        })

    return _timed(build, timing)


def cmd_gbd(model: str, A: float, B: float, n: int, w: Optional[float] = None,
            gamma: Optional[float] = None, photon_rate: Optional[float] = None,
            timing: bool = False) -> RunReport:
    """Row W(k, n-k) with the binomial and Polya rows alongside"""
    stat = build_model(model, w, gamma, photon_rate)
    _require({'A': A, 'B': B, 'n': n}, ('A', 'B', 'n'))

    def build() -> RunReport:
        table = gbd_table(n, stat, A, B)
        split = split_probabilities(A, B)
        classical = binomial_table(table.n, split)
        polya = polya_table(table.n, split, A + B)
        rows = [{'k': k, 'm': table.n - k, 'W': float(table[k]),
                 'binomial': float(classical[k]), 'polya': float(polya[k])}
                for k in range(table.n + 1)]
        parameters = {**stat.describe(), 'A': A, 'B': B, 'n': n}
        return RunReport('gbd', parameters, rows, checks={
            'alpha': split.alpha,
            'tv_to_binomial': pmf_tv_distance(table, classical),
            'tv_to_polya': pmf_tv_distance(table, polya),
        })

    return _timed(build, timing)


def cmd_figures(which: str, alpha: Optional[float] = None, s_min: Optional[float] = None,
                s_max: Optional[float] = None, points: Optional[int] = None,
                n: Optional[int] = None, s_values: Optional[List[float]] = None,
                timing: bool = False) -> RunReport:
    """Data table behind one figure, with its qualitative checks"""

    def build() -> RunReport:
        if which == 'fig4':
            grid = {'alpha': alpha, 'n': n, 's_values': s_values}
        else:
            grid = {'alpha': alpha, 's_min': s_min, 's_max': s_max, 'points': points}
        table = build_figure(which, **grid)
        checks = check_figure(table)
        passed = bool(checks.pop('passed'))
        rows = [dict(zip(table.columns, row)) for row in table.rows]
        parameters = {'which': which, **{k: v for k, v in grid.items() if v is not None}}
        return RunReport('figures', parameters, rows, checks=checks, passed=passed)

    return _timed(build, timing)


def cmd_verify(suite: str = 'all', fault: bool = False, detail: bool = False,
               timing: bool = False) -> RunReport:
    """Run verification suites; the report passes iff every residual is within tolerance"""

    def build() -> RunReport:
        results = run_suites(suite, fault)
        rows = [result.to_dict(detail) for result in results]
        checks = {result.name: result.passed for result in results}
        parameters = {'suite': suite}
        if fault:
            parameters['inject_fault'] = True
        return RunReport('verify', parameters, rows, checks=checks,
                         passed=all(result.passed for result in results))

    return _timed(build, timing)


def _batched(draw: Callable[[np.random.Generator, int], np.ndarray]):
    """Histogram task drawing in batches of at most MC_BATCH_SIZE"""

    def task(rng: np.random.Generator, size: int) -> EmpiricalHist:
        hist = EmpiricalHist(np.zeros(1, dtype=np.int64))
        remaining = size
        while remaining > 0:
            batch = min(remaining, config.MC_BATCH_SIZE)
            hist = hist.merge(histogram(draw(rng, batch)))
            remaining -= batch
        return hist

    return task


def cmd_sample(target: str, M: int, seed: Optional[int] = None, n: Optional[int] = None,
               alpha: Optional[float] = None, S: Optional[float] = None,
               mean: Optional[float] = None, A: Optional[float] = None,
               B: Optional[float] = None, w: Optional[float] = None, model: str = 'be',
               shards: Optional[int] = None, timing: bool = False) -> RunReport:
    """Monte Carlo histogram against its analytic law"""
    if target not in SAMPLE_TARGETS:
        raise ValidationError(
            f"Unknown sampling target '{target}', expected one of {', '.join(SAMPLE_TARGETS)}")
    M = require_count(M, 'M')
    if M < config.MIN_SAMPLE_DRAWS:
        raise ValidationError(f"M must be at least {config.MIN_SAMPLE_DRAWS}, got: {M}")
    seed = resolve_seed(seed)
    shards = config.MC_SHARDS if shards is None else require_count(shards, 'shards')
    extra: Dict[str, Any] = {}

    if target == 'polya':
        _require({'n': n, 'alpha': alpha, 'S': S}, ('n', 'alpha', 'S'))
        split = SplitSpec.from_alpha(alpha)
        reference = polya_table(n, split, S)
        task = _batched(lambda rng, size: sample_polya(n, split, S, rng, size))
        parameters = {'polya': True, 'n': n, 'alpha': alpha, 'S': S}
    elif target == 'poisson':
        _require({'mean': mean}, ('mean',))
        stat = StatModel.poisson(mean)
        reference = pmf_table(stat, 1.0)
        task = _batched(lambda rng, size: sample_model(stat, 1.0, rng, size))
        parameters = {'poisson': True, 'mean': mean}
    elif target == 'be':
        _require({'A': A, 'w': w}, ('A', 'w'))
        stat = StatModel.bose_einstein(w)
        reference = pmf_table(stat, A)
        task = _batched(lambda rng, size: sample_model(stat, A, rng, size))
        parameters = {'be': True, 'A': A, 'w': w}
    else:
        _require({'A': A, 'B': B, 'w': w, 'n': n}, ('A', 'B', 'w', 'n'))
        stat = build_model(model, w)
        if stat.family is StatFamily.GLAUBER:
            raise ValidationError("Conditional sampling supports Poisson and Bose-Einstein models")
        reference = gbd_table(n, stat, A, B)
        budget = int(config.MC_DRAW_BUDGET) // max(shards, 1)

        def task(rng: np.random.Generator, size: int) -> EmpiricalHist:
            return empirical_gbd(stat, A, B, n, rng, target=size, budget=budget)

        parameters = {'gbd': True, 'model': model, 'A': A, 'B': B, 'w': w, 'n': n}
        split = split_probabilities(A, B)
        extra['tv_binomial_reference'] = pmf_tv_distance(reference, binomial_table(n, split))
        if stat.family is StatFamily.BOSE_EINSTEIN:
            extra['tv_polya_reference'] = pmf_tv_distance(
                reference, polya_table(n, split, A + B))
    parameters.update({'M': M, 'seed': seed})
    rng_info = {**RngStream(seed).describe(), 'shards': shards}
    rng_info.pop('stream_id')

    def build() -> RunReport:
        logger.info(f"Sampling {target} with M={M}, seed={seed}, {shards} shards")
        hist = run_sharded(task, seed, M, shards)
        probs = np.asarray(getattr(reference, 'probs', getattr(reference, 'w_values', None)))
        size = max(hist.counts.size, probs.size)
        counts = np.pad(hist.counts, (0, size - hist.counts.size))
        freqs = np.pad(hist.frequencies, (0, size - hist.counts.size))
        ref = np.pad(probs, (0, size - probs.size))
        rows = [{'k': k, 'count': int(counts[k]), 'empirical': float(freqs[k]),
                 'reference': float(ref[k])} for k in range(size)]

        checks: Dict[str, Any] = {
            'draws': hist.total,
            'tv_distance': tv_distance(hist, reference),
            'reference_tail_bound': float(getattr(reference, 'tail_bound', 0.0)),
        }
        try:
            pvalue: Optional[float] = chi_square_pvalue(hist, reference)
        except NumericalError as exc:
            # single-point law: the histogram either matches it or it does not
            logger.info(f"chi-square skipped: {exc}")
            pvalue = None
        checks['chi_square_pvalue'] = pvalue
        if target == 'gbd':
            checks['acceptance_rate'] = hist.acceptance_rate
            checks['attempts'] = hist.attempts
            checks['tv_to_binomial'] = tv_distance(hist, binomial_table(n, split))
        checks.update(extra)
        passed = (pvalue >= config.SAMPLE_PVALUE_THRESHOLD if pvalue is not None
                  else checks['tv_distance'] == 0.0)
        if not passed:
            logger.error(f"Sample disagrees with its analytic law: p-value {pvalue}")
        return RunReport('sample', parameters, rows, checks=checks, rng=rng_info, passed=passed)

    return _timed(build, timing)


def cmd_scenario(device: str, alpha: float, model: str, S: float,
                 w: Optional[float] = None, gamma: Optional[float] = None,
                 photon_rate: Optional[float] = None,
                 cascade_alphas: Optional[Sequence[float]] = None,
                 n_max: Optional[int] = None, timing: bool = False) -> RunReport:
    """Joint and marginal output tables of a beam behind one (or a cascade of) devices.

    The report records the effective transmittance and not the device kind, so
    different kinds and equivalent cascades give identical output.
    """
    try:
        kind = DeviceKind(device)
    except ValueError:
        kinds = ', '.join(k.value for k in DeviceKind)
        raise ValidationError(f"Unknown device '{device}', expected one of {kinds}")
    stat = build_model(model, w, gamma, photon_rate)
    _require({'alpha': alpha, 'S': S}, ('alpha', 'S'))
    effective = SplitDevice(kind, alpha)
    for stage in cascade_alphas or ():
        effective = cascade(effective, SplitDevice(kind, stage))
    beam = BeamState(stat, S)
    logger.info(f"{kind.value}: {effective.loss_note}")

    def build() -> RunReport:
        joint = joint_output_distribution(beam, effective, n_max)
        rows: List[Dict[str, Any]] = []
        for total in range(joint.n_max + 1):
            for k in range(total + 1):
                rows.append({'table': 'joint', 'k': k, 'm': total - k,
                             'probability': float(joint.probs[k, total - k])})
        transmitted = joint.transmitted()
        complementary = joint.complementary()
        rows += [{'table': 'transmitted', 'k': k, 'm': None, 'probability': float(p)}
                 for k, p in enumerate(transmitted)]
        rows += [{'table': 'complementary', 'k': k, 'm': None, 'probability': float(p)}
                 for k, p in enumerate(complementary)]

        own = pmf_table(stat, effective.transmittance * beam.volume.cells, joint.n_max).probs
        residual = float(np.max(np.abs(transmitted - own)))
        parameters = {'alpha': effective.transmittance, **stat.describe(),
                      'S': beam.volume.cells, 'nmax': n_max}
        checks = {
            'n_max': joint.n_max,
            'tail_bound': joint.tail_bound,
            'marginal_residual': residual,
        }
        return RunReport('scenario', parameters, rows, checks=checks,
                         passed=residual <= SCENARIO_TOLERANCE)

    return _timed(build, timing)
