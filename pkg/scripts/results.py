"""Sweep results and their JSON / CSV documents"""
import csv
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = '1'

CSV_COLUMNS = (
    'arm', 'index', 'metric', 'mean_disc', 'std_disc', 'ci_low', 'ci_high', 'n_defined', 'repeats',
    'cost_a0_mean', 'cost_a1_mean', 'main_pred_disc', 'estimate', 'mean_estimate', 'bias_term', 'variance_term',
)


@dataclass
class MetricSeries:
    """One metric at one sweep index"""
    mean_disc: Optional[float]
    std_disc: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    n_defined: int
    repeats: int
    cost_a0_mean: Optional[float]
    cost_a1_mean: Optional[float]
    main_pred_disc: Optional[float] = None
    estimate: Optional[float] = None
    mean_estimate: Optional[float] = None
    bias_term: Optional[float] = None
    variance_term: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in CSV_COLUMNS[3:]}


@dataclass
class IndexResult:
    """Everything measured at one sweep index (m, f1 or growing size) for one arm"""
    arm: str
    index: Union[int, float]
    metrics: Dict[str, MetricSeries]
    decomposition: Optional[Dict[str, Any]] = None
    importance: Optional[Dict[str, Any]] = None
    degenerate_fits: int = 0
    train_group_fraction_a1: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'arm': self.arm,
            'index': self.index,
            'metrics': {name: series.to_dict() for name, series in self.metrics.items()},
            'decomposition': self.decomposition,
            'importance': self.importance,
            'degenerate_fits': self.degenerate_fits,
            'train_group_fraction_a1': self.train_group_fraction_a1,
        }


@dataclass
class SweepResult:
    config: Dict[str, Any]
    index_name: str
    estimate_kind: str
    reference_index: Union[int, float]
    series: List[IndexResult] = field(default_factory=list)
    started_at: Optional[str] = None
    population: Optional[Dict[str, Any]] = None

    def arm(self, name: str) -> List[IndexResult]:
        return [entry for entry in self.series if entry.arm == name]

    def entry(self, index, arm: str = None) -> IndexResult:
        for item in self.series:
            if item.index == index and (arm is None or item.arm == arm):
                return item
        raise KeyError(f"no series entry for index {index} arm {arm}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'config': self.config,
            'started_at': self.started_at,
            'index_name': self.index_name,
            'estimate_kind': self.estimate_kind,
            'reference_index': self.reference_index,
            'population': self.population,
            'series': [entry.to_dict() for entry in self.series],
        }

    def csv_rows(self) -> List[List[Any]]:
        rows = []
        for entry in self.series:
            for metric, series in entry.metrics.items():
                values = series.to_dict()
                rows.append([entry.arm, entry.index, metric] + [values[c] for c in CSV_COLUMNS[3:]])
        return rows


def plain(value):
    """Recursively turn numpy scalars/arrays into JSON-native values; NaN becomes None"""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if np.isnan(value) or np.isinf(value) else value
    return value


def render_json(document: Dict[str, Any]) -> str:
    # json writes floats with repr(), the shortest string that round-trips
    return json.dumps(plain(document), indent=2, allow_nan=False) + '\n'


def _csv_cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return '%.17g' % value
    return str(value)


def render_csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(plain(v)) for v in row])
    return buffer.getvalue()


def atomic_write(path, text: str) -> Path:
    """Write to a temp file beside `path`, then rename it into place"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def csv_path_for(path) -> Path:
    path = Path(path)
    return path.with_suffix('.csv') if path.suffix.lower() != '.csv' else path


def json_path_for(path) -> Path:
    path = Path(path)
    return path.with_suffix('.json') if path.suffix.lower() != '.json' else path


def save_result(result: SweepResult, out, fmt: str = 'json') -> List[Path]:
    """Write the JSON document, the flat CSV, or both; returns the paths written"""
    written = []
    try:
        if fmt in ('json', 'both'):
            target = json_path_for(out) if fmt == 'both' else Path(out)
            written.append(atomic_write(target, render_json(result.to_dict())))
        if fmt in ('csv', 'both'):
            target = csv_path_for(out) if fmt == 'both' else Path(out)
            written.append(atomic_write(target, render_csv(CSV_COLUMNS, result.csv_rows())))
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    for path in written:
        logger.info(f"  Results saved to {path}")
    return written
