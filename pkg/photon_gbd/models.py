"""
Data models for the photon-gbd toolkit
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config.settings import get_config
from photon_gbd.utils import (
    DomainError, ValidationError, require_count, require_nonnegative, require_positive
)

config = get_config()


@dataclass(frozen=True)
class PhaseVolume:
    """Dimensionless phase-space volume, in units of coherence volume"""
    cells: float

    def __post_init__(self):
        object.__setattr__(self, 'cells', require_positive(self.cells, 'volume'))

    def __add__(self, other: 'PhaseVolume') -> 'PhaseVolume':
        return PhaseVolume(self.cells + other.cells)

    @classmethod
    def of(cls, value: Union['PhaseVolume', float]) -> 'PhaseVolume':
        return value if isinstance(value, PhaseVolume) else cls(value)


@dataclass(frozen=True)
class DegeneracyParam:
    """Mean photon number per phase-space cell"""
    w: float

    def __post_init__(self):
        object.__setattr__(self, 'w', require_nonnegative(self.w, 'w'))

    @classmethod
    def of(cls, value: Union['DegeneracyParam', float]) -> 'DegeneracyParam':
        return value if isinstance(value, DegeneracyParam) else cls(value)


@dataclass(frozen=True)
class SplitSpec:
    """Probabilities of finding a photon in each of the two parts"""
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ('alpha', 'beta'):
            value = float(getattr(self, name))
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie strictly between 0 and 1, got: {value}")
            object.__setattr__(self, name, value)
        if abs(self.alpha + self.beta - 1.0) > config.SPLIT_SUM_TOLERANCE:
            raise ValidationError(
                f"alpha + beta must equal 1, got: {self.alpha} + {self.beta}")

    @classmethod
    def from_alpha(cls, alpha: float) -> 'SplitSpec':
        alpha = float(alpha)
        return cls(alpha, 1.0 - alpha)

    def swapped(self) -> 'SplitSpec':
        return SplitSpec(self.beta, self.alpha)


@dataclass(eq=False)
class PmfTable:
    """Finite prefix p_0..p_K of a photon-number distribution"""
    probs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.ndim != 1 or self.probs.size == 0:
            raise ValidationError("pmf table needs a non-empty 1-d probability vector")
        if np.any(self.probs < 0) or not np.all(np.isfinite(self.probs)):
            raise ValidationError("pmf table entries must be finite and nonnegative")
        self.tail_bound = float(self.tail_bound)
        if self.tail_bound < 0:
            raise ValidationError(f"tail bound must be nonnegative, got: {self.tail_bound}")
        total = math.fsum(self.probs) + self.tail_bound
        if abs(total - 1.0) > config.PMF_TABLE_TOLERANCE:
            raise ValidationError(
                f"pmf table mass plus tail bound must be 1, got: {total!r}")

    @property
    def k_max(self) -> int:
        return self.probs.size - 1

    @property
    def total(self) -> float:
        return math.fsum(self.probs)

    def mean(self) -> float:
        return float(np.dot(np.arange(self.probs.size), self.probs))

    @classmethod
    def from_probs(cls, probs) -> 'PmfTable':
        """Wrap an exact probability vector, charging the missing mass to the tail"""
        probs = np.asarray(probs, dtype=float)
        return cls(probs, max(0.0, 1.0 - math.fsum(probs)))


class StatFamily(Enum):
    """Photon statistics families satisfying the convolution system"""
    POISSON = "poisson"
    BOSE_EINSTEIN = "be"
    GLAUBER = "glauber"


@dataclass(frozen=True)
class StatModel:
    """A photon statistics able to answer p_k(volume) for any volume"""
    family: StatFamily
    w: float = 0.0
    gamma: Optional[float] = None
    photon_rate: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.family, StatFamily):
            object.__setattr__(self, 'family', StatFamily(self.family))
        if self.family is StatFamily.GLAUBER:
            if self.gamma is None or self.photon_rate is None:
                raise ValidationError("Glauber statistics needs gamma and photon_rate")
            object.__setattr__(self, 'gamma', require_positive(self.gamma, 'gamma'))
            object.__setattr__(self, 'photon_rate',
                               require_nonnegative(self.photon_rate, 'photon_rate'))
        else:
            object.__setattr__(self, 'w', require_nonnegative(self.w, 'w'))

    @classmethod
    def poisson(cls, density: float) -> 'StatModel':
        return cls(StatFamily.POISSON, w=density)

    @classmethod
    def bose_einstein(cls, w: Union[DegeneracyParam, float]) -> 'StatModel':
        return cls(StatFamily.BOSE_EINSTEIN, w=DegeneracyParam.of(w).w)

    @classmethod
    def glauber(cls, gamma: float, photon_rate: float) -> 'StatModel':
        return cls(StatFamily.GLAUBER, gamma=gamma, photon_rate=photon_rate)

    def describe(self) -> Dict[str, Any]:
        if self.family is StatFamily.GLAUBER:
            return {"model": self.family.value, "gamma": self.gamma,
                    "photon_rate": self.photon_rate}
        return {"model": self.family.value, "w": self.w}


@dataclass(eq=False)
class GbdTable:
    """Row W(k, n-k), k = 0..n, of the generalized binomial distribution"""
    n: int
    w_values: np.ndarray

    def __post_init__(self):
        self.n = require_count(self.n, 'n')
        self.w_values = np.asarray(self.w_values, dtype=float)
        if self.w_values.shape != (self.n + 1,):
            raise ValidationError(f"GBD row for n={self.n} needs {self.n + 1} entries")
        if np.any(self.w_values < 0) or np.any(self.w_values > 1):
            raise ValidationError("GBD entries must lie in [0, 1]")
        total = math.fsum(self.w_values)
        if abs(total - 1.0) > config.GBD_NORMALIZATION_TOLERANCE:
            raise ValidationError(f"GBD row is not normalized: sum = {total!r}")

    def __getitem__(self, k: int) -> float:
        return float(self.w_values[k])


@dataclass(eq=False)
class SeriesPoly:
    """Truncated power series c_0 + c_1 z + ... + c_N z^N"""
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=float)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValidationError("series needs a non-empty 1-d coefficient vector")

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __getitem__(self, k: int) -> float:
        return float(self.coeffs[k])


@dataclass(frozen=True)
class GlauberParams:
    """Lorentzian-line photon statistics: half-width, photon rate, sampling time"""
    gamma: float
    photon_rate: float
    tau: float

    def __post_init__(self):
        object.__setattr__(self, 'gamma', require_positive(self.gamma, 'gamma'))
        object.__setattr__(self, 'photon_rate',
                           require_nonnegative(self.photon_rate, 'photon_rate'))
        object.__setattr__(self, 'tau', require_positive(self.tau, 'tau'))


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by (seed, stream id)"""
    seed: int
    stream_id: int = 0
    algorithm: str = config.RNG_ALGORITHM

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got: {self.seed}")
        object.__setattr__(self, 'seed', int(self.seed))
        object.__setattr__(self, 'stream_id', require_count(self.stream_id, 'stream_id'))

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(sequence))

    def describe(self) -> Dict[str, Any]:
        return {"algorithm": self.algorithm, "seed": self.seed, "stream_id": self.stream_id}


@dataclass(eq=False)
class EmpiricalHist:
    """Counts per outcome k from M draws"""
    counts: np.ndarray
    attempts: int = 0

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if np.any(self.counts < 0):
            raise ValidationError("histogram counts must be nonnegative")
        if not self.attempts:
            self.attempts = self.total

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        total = self.total
        return self.counts / total if total else np.zeros(self.counts.size)

    @property
    def acceptance_rate(self) -> float:
        return self.total / self.attempts if self.attempts else 0.0

    def merge(self, other: 'EmpiricalHist') -> 'EmpiricalHist':
        size = max(self.counts.size, other.counts.size)
        counts = np.zeros(size, dtype=np.int64)
        counts[:self.counts.size] += self.counts
        counts[:other.counts.size] += other.counts
        return EmpiricalHist(counts, self.attempts + other.attempts)


class DeviceKind(Enum):
    """Macroscopic devices that split a photon flux in two"""
    DIAPHRAGM = "diaphragm"
    BEAMSPLITTER = "beamsplitter"
    DETECTOR = "detector"
    NEUTRAL_FILTER = "neutral_filter"


LOSS_NOTES = {
    DeviceKind.DIAPHRAGM: "complementary part is absorbed by the screen",
    DeviceKind.BEAMSPLITTER: "complementary part leaves through the reflected port",
    DeviceKind.DETECTOR: "complementary part is the undetected photons (not observable)",
    DeviceKind.NEUTRAL_FILTER: "complementary part is reflected and absorbed (not observable)",
}


@dataclass(frozen=True)
class SplitDevice:
    """A splitting element of transmittance alpha"""
    kind: DeviceKind
    transmittance: float

    def __post_init__(self):
        if not isinstance(self.kind, DeviceKind):
            object.__setattr__(self, 'kind', DeviceKind(self.kind))
        # SplitSpec carries the (0, 1) check
        object.__setattr__(self, 'transmittance',
                           SplitSpec.from_alpha(self.transmittance).alpha)

    @property
    def split(self) -> SplitSpec:
        return SplitSpec.from_alpha(self.transmittance)

    @property
    def loss_note(self) -> str:
        return LOSS_NOTES[self.kind]

    @property
    def complementary_observable(self) -> bool:
        return self.kind in (DeviceKind.DIAPHRAGM, DeviceKind.BEAMSPLITTER)


@dataclass(frozen=True)
class BeamState:
    """Light beam of known statistics occupying volume S"""
    model: StatModel
    volume: PhaseVolume

    def __post_init__(self):
        object.__setattr__(self, 'volume', PhaseVolume.of(self.volume))


@dataclass(eq=False)
class JointTable:
    """P(k transmitted, m complementary) for k + m <= n_max"""
    probs: np.ndarray
    transmittance: float
    tail_bound: float = 0.0

    @property
    def n_max(self) -> int:
        return self.probs.shape[0] - 1

    def transmitted(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def complementary(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def post_selected(self, n: int) -> GbdTable:
        """Conditional law of k given k + m = n"""
        n = require_count(n, 'n')
        if n > self.n_max:
            raise ValidationError(f"n={n} exceeds the table's n_max={self.n_max}")
        ks = np.arange(n + 1)
        row = self.probs[ks, n - ks]
        total = row.sum()
        if total <= 0:
            raise ValidationError(f"total count n={n} has zero probability")
        return GbdTable(n, row / total)


@dataclass
class RunReport:
    """Self-describing result of one command"""
    command: str
    parameters: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    checks: Dict[str, Any] = field(default_factory=dict)
    rng: Optional[Dict[str, Any]] = None
    wall_time: Optional[float] = None
    passed: bool = True
    schema_version: str = config.SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        report = {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": self.parameters,
            "passed": self.passed,
            "checks": self.checks,
            "rows": self.rows,
        }
        if self.rng is not None:
            report["rng"] = self.rng
        if self.wall_time is not None:
            report["wall_time"] = self.wall_time
        return report
