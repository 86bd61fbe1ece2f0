"""
CSV and JSON rendering of command reports
"""
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import get_config
from photon_gbd.models import RunReport
from photon_gbd.utils import canonical_flags, format_csv_number, json_number

config = get_config()


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-safe Python values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return json_number(value)
    return value


class ReportWriter:
    """Renders RunReports as machine-readable text"""

    def __init__(self, digits: Optional[int] = None):
        self.logger = logging.getLogger(__name__)
        self.digits = digits or config.CSV_SIGNIFICANT_DIGITS

    def to_json(self, report: RunReport) -> str:
        """Shortest round-trip repr for floats; non-finite values become strings"""
        return json.dumps(_plain(report.to_dict()), indent=2, allow_nan=False) + '\n'

    def _cell(self, value: Any) -> str:
        if value is None:
            return ''
        if isinstance(value, (bool, np.bool_)):
            return 'true' if value else 'false'
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return format_csv_number(value, self.digits)
        return str(value)

    def metadata(self, report: RunReport) -> List[str]:
        lines = [
            f"# schema_version: {report.schema_version}",
            f"# command: {report.command} {canonical_flags(report.parameters)}".rstrip(),
        ]
        if report.rng is not None:
            lines.append(f"# rng: {report.rng['algorithm']} seed={report.rng['seed']}")
        for key, value in report.checks.items():
            if not isinstance(value, (dict, list)):
                lines.append(f"# check.{key}: {self._cell(value)}")
        lines.append(f"# passed: {self._cell(report.passed)}")
        if report.wall_time is not None:
            lines.append(f"# wall_time: {self._cell(report.wall_time)}")
        return lines

    def to_csv(self, report: RunReport, columns: Optional[List[str]] = None) -> str:
        """Metadata as '#' comment lines, then a header row and one row per record"""
        if columns is None:
            columns = list(report.rows[0].keys()) if report.rows else []
        buffer = io.StringIO()
        for line in self.metadata(report):
            buffer.write(line + '\n')
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(columns)
        for row in report.rows:
            writer.writerow([self._cell(row.get(column)) for column in columns])
        return buffer.getvalue()

    def render(self, report: RunReport, fmt: str) -> str:
        return self.to_csv(report) if fmt == 'csv' else self.to_json(report)

    def write(self, text: str, output: Optional[str] = None) -> None:
        """Write to the output path, or stdout when none is given"""
        if output is None or output == '-':
            sys.stdout.write(text)
            return
        with open(output, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        self.logger.info(f"Wrote {len(text)} bytes to {output}")


def report_payload(report: RunReport) -> Dict[str, Any]:
    """JSON-safe dict form of a report, for the HTTP surface"""
    return _plain(report.to_dict())
