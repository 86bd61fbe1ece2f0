"""
Data tables behind the photon-bunching figures and their qualitative checks
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from photon_gbd.distributions import binomial_table, pmf_tv_distance, polya_pmf
from photon_gbd.models import SplitSpec
from photon_gbd.utils import ValidationError, require_count, require_positive

logger = logging.getLogger(__name__)

FIGURES = ('fig2', 'fig3', 'fig4')
FIG4_S_VALUES = (1.0, 10.0, 100.0, 1.0e4)


@dataclass
class FigureTable:
    """Columns and rows of one figure's data"""
    name: str
    columns: List[str]
    rows: List[List[float]]
    parameters: Dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows])


def log_grid(s_min: float, s_max: float, points: int) -> np.ndarray:
    s_min = require_positive(s_min, 's_min')
    s_max = require_positive(s_max, 's_max')
    points = require_count(points, 'points')
    if s_max <= s_min or points < 2:
        raise ValidationError("volume grid needs s_min < s_max and at least 2 points")
    return np.logspace(np.log10(s_min), np.log10(s_max), points)


def _volume_sweep(name: str, n: int, alpha: float, s_min: float, s_max: float,
                  points: int) -> FigureTable:
    split = SplitSpec.from_alpha(alpha)
    columns = ['S'] + [f'W{k}{n - k}' for k in range(n, -1, -1)]
    rows = []
    for s in log_grid(s_min, s_max, points):
        rows.append([float(s)] + [polya_pmf(k, n, split, s) for k in range(n, -1, -1)])
    return FigureTable(name, columns, rows, {
        'alpha': split.alpha, 'n': n, 's_min': s_min, 's_max': s_max, 'points': points})


def fig2_table(alpha: float = 0.5, s_min: float = 1e-2, s_max: float = 1e2,
               points: int = 41) -> FigureTable:
    """Two photons between two parts of S versus S"""
    return _volume_sweep('fig2', 2, alpha, s_min, s_max, points)


def fig3_table(alpha: float = 0.55, s_min: float = 1e-2, s_max: float = 1e2,
               points: int = 41) -> FigureTable:
    """Three photons between unequal parts of S versus S"""
    return _volume_sweep('fig3', 3, alpha, s_min, s_max, points)


def fig4_table(alpha: float = 0.5, n: int = 50,
               s_values: Sequence[float] = FIG4_S_VALUES) -> FigureTable:
    """n photons between two parts, one column per volume plus the binomial limit"""
    split = SplitSpec.from_alpha(alpha)
    n = require_count(n, 'n')
    s_values = [require_positive(s, 'S') for s in s_values]
    if not s_values:
        raise ValidationError("fig4 needs at least one volume")
    columns = ['k'] + [f'S={s:g}' for s in s_values] + ['binomial']
    classical = binomial_table(n, split)
    rows = []
    for k in range(n + 1):
        rows.append([k] + [polya_pmf(k, n, split, s) for s in s_values] + [classical[k]])
    return FigureTable('fig4', columns, rows, {
        'alpha': split.alpha, 'n': n, 's_values': list(s_values)})


def check_figure(table: FigureTable) -> Dict[str, Any]:
    """Programmatic form of the qualitative claims each figure makes"""
    alpha = table.parameters['alpha']
    beta = 1.0 - alpha
    if table.name in ('fig2', 'fig3'):
        n = table.parameters['n']
        s = table.column('S')
        edge_a = table.column(f'W{n}0')
        # columns run from k = n down to 0
        classical = binomial_table(n, SplitSpec.from_alpha(alpha).swapped()).w_values
        last = np.array(table.rows[-1][1:])
        checks = {
            'edge_decreasing': bool(np.all(np.diff(edge_a) < 0)),
            'classical_gap_at_max_S': float(np.max(np.abs(last - classical))),
            'max_S': float(s[-1]),
        }
        if n == 2:
            checks['middle_increasing'] = bool(np.all(np.diff(table.column('W11')) > 0))
        checks['passed'] = checks['edge_decreasing'] and checks.get('middle_increasing', True)
        return checks
    if table.name == 'fig4':
        n = table.parameters['n']
        s_values = table.parameters['s_values']
        classical = table.column('binomial')
        smallest = table.column(f'S={min(s_values):g}')
        largest = table.column(f'S={max(s_values):g}')
        peak = smallest.max()
        checks = {
            'edge_maxima_at_smallest_S': bool(np.isclose(smallest[0], peak, rtol=1e-12)
                                              and np.isclose(smallest[-1], peak, rtol=1e-12))
            if alpha == beta else bool(smallest[0] == peak or smallest[-1] == peak),
            'minimum_k_at_smallest_S': int(np.argmin(smallest)),
            'tv_to_binomial_at_largest_S': pmf_tv_distance(largest, classical),
        }
        checks['passed'] = (checks['edge_maxima_at_smallest_S']
                            and checks['tv_to_binomial_at_largest_S'] < 0.05)
        if alpha == beta:
            checks['passed'] = checks['passed'] and checks['minimum_k_at_smallest_S'] == n // 2
        return checks
    raise ValidationError(f"Unknown figure: {table.name}")


def build_figure(which: str, **grid) -> FigureTable:
    builders = {'fig2': fig2_table, 'fig3': fig3_table, 'fig4': fig4_table}
    if which not in builders:
        raise ValidationError(f"Unknown figure '{which}', expected one of {', '.join(FIGURES)}")
    options = {key: value for key, value in grid.items() if value is not None}
    logger.info(f"Building {which} with {options}")
    return builders[which](**options)
