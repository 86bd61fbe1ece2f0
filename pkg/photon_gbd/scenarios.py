"""
Diaphragm, beamsplitter, photodetector and neutral filter as one splitting model.

The device kind never enters the arithmetic: given the same transmittance and
input beam, every kind yields the same tables.  For detectors and filters the
complementary count is computed internally as a modelling identity only; it is
not something those devices let you observe.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from config.settings import get_config
from photon_gbd.distributions import (
    binomial_table, gbd_row, log_pmf_table, pmf_table, pmf_tv_distance
)
from photon_gbd.models import (
    BeamState, DeviceKind, GbdTable, JointTable, PhaseVolume, PmfTable, SplitDevice
)
from photon_gbd.utils import ValidationError, require_count

logger = logging.getLogger(__name__)
config = get_config()


def _split_volumes(beam: BeamState, device: SplitDevice) -> Tuple[PhaseVolume, PhaseVolume]:
    split = device.split
    cells = beam.volume.cells
    return PhaseVolume(split.alpha * cells), PhaseVolume(split.beta * cells)


def _resolve_n_max(beam: BeamState, n_max: Optional[int]) -> Tuple[int, float]:
    if n_max is None:
        table = pmf_table(beam.model, beam.volume)
        return table.k_max, table.tail_bound
    n_max = require_count(n_max, 'n_max')
    tail = pmf_table(beam.model, beam.volume, n_max).tail_bound
    if tail >= config.JOINT_TAIL_TARGET:
        raise ValidationError(
            f"n_max={n_max} leaves a tail bound of {tail:.3e}; "
            f"need below {config.JOINT_TAIL_TARGET}")
    return n_max, tail


def joint_output_distribution(beam: BeamState, device: SplitDevice,
                              n_max: Optional[int] = None) -> JointTable:
    """P(k, m) = p_n(S) W(k, m) with n = k + m, for k + m <= n_max"""
    n_max, tail = _resolve_n_max(beam, n_max)
    A, B = _split_volumes(beam, device)
    log_a = log_pmf_table(beam.model, A, n_max)
    log_b = log_pmf_table(beam.model, B, n_max)
    log_s = log_pmf_table(beam.model, beam.volume, n_max)

    probs = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        if not log_s[n] > config.GBD_LOG_DENOMINATOR_FLOOR:
            continue
        ks = np.arange(n + 1)
        probs[ks, n - ks] = np.exp(log_s[n]) * gbd_row(n, log_a, log_b, log_s[n])
    logger.debug(f"Joint table for {device.kind.value} alpha={device.transmittance}: "
                 f"n_max={n_max}, tail bound {tail:.3e}")
    return JointTable(probs, device.transmittance, tail)


def transmitted_marginal(beam: BeamState, device: SplitDevice,
                         n_max: Optional[int] = None) -> PmfTable:
    """Statistics of the transmitted (or detected) photons"""
    joint = joint_output_distribution(beam, device, n_max)
    return PmfTable.from_probs(joint.transmitted())


def complementary_marginal(beam: BeamState, device: SplitDevice,
                           n_max: Optional[int] = None) -> PmfTable:
    """Statistics of the photons removed by the device"""
    joint = joint_output_distribution(beam, device, n_max)
    return PmfTable.from_probs(joint.complementary())


def cascade(device1: SplitDevice, device2: SplitDevice) -> SplitDevice:
    """Single device equivalent to device1 followed by device2"""
    kind = device1.kind if device1.kind is device2.kind else DeviceKind.BEAMSPLITTER
    return SplitDevice(kind, device1.transmittance * device2.transmittance)


def post_selected(beam: BeamState, device: SplitDevice, n: int) -> GbdTable:
    """Output law conditioned on n photons in total"""
    n = require_count(n, 'n')
    joint = joint_output_distribution(beam, device)
    if n > joint.n_max:
        joint = joint_output_distribution(beam, device, n)
    return joint.post_selected(n)


def deviation_from_binomial(beam: BeamState, device: SplitDevice, n: int) -> float:
    """TV distance between the post-selected output and binomial(n, alpha)"""
    return pmf_tv_distance(post_selected(beam, device, n), binomial_table(n, device.split))
