"""CSV Collector - ingest a benchmark CSV into an encoded Dataset"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from errors import SchemaError, ValidationError
from .dataset import A0, A1, Dataset

logger = logging.getLogger(__name__)

FEATURE_KINDS = ('numeric', 'categorical')


@dataclass(frozen=True)
class DataSchema:
    """Which columns are Y, A and features, and how raw values map to 0/1"""
    label_column: str
    positive_label: str
    sensitive_column: str
    privileged_value: str
    feature_columns: Tuple[Tuple[str, str], ...]
    include_sensitive_as_feature: bool = True
    missing_markers: Tuple[str, ...] = ('?',)

    def __post_init__(self):
        columns = tuple((str(name), str(kind)) for name, kind in self.feature_columns)
        object.__setattr__(self, 'feature_columns', columns)
        object.__setattr__(self, 'positive_label', str(self.positive_label).strip())
        object.__setattr__(self, 'privileged_value', str(self.privileged_value).strip())
        object.__setattr__(self, 'missing_markers', tuple(self.missing_markers))

        if not columns:
            raise SchemaError("schema needs at least one feature column")
        names = [name for name, _ in columns]
        for name, kind in columns:
            if kind not in FEATURE_KINDS:
                raise SchemaError(f"feature '{name}' has unknown kind '{kind}'", column=name)
            if names.count(name) > 1:
                raise SchemaError(f"feature '{name}' is listed more than once", column=name)
        for special in (self.label_column, self.sensitive_column):
            if special in names:
                raise SchemaError(f"column '{special}' cannot also be a feature column", column=special)
        if self.label_column == self.sensitive_column:
            raise SchemaError("label and sensitive columns must differ", column=self.label_column)

    @property
    def used_columns(self) -> List[str]:
        return [self.label_column, self.sensitive_column] + [name for name, _ in self.feature_columns]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DataSchema':
        try:
            return cls(
                label_column=data['label_column'],
                positive_label=data['positive_label'],
                sensitive_column=data['sensitive_column'],
                privileged_value=data['privileged_value'],
                feature_columns=tuple(tuple(item) for item in data['feature_columns']),
                include_sensitive_as_feature=bool(data.get('include_sensitive_as_feature', True)),
                missing_markers=tuple(data.get('missing_markers', ('?',))),
            )
        except KeyError as e:
            raise SchemaError(f"schema is missing field {e}", column=str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            'label_column': self.label_column,
            'positive_label': self.positive_label,
            'sensitive_column': self.sensitive_column,
            'privileged_value': self.privileged_value,
            'feature_columns': [list(item) for item in self.feature_columns],
            'include_sensitive_as_feature': self.include_sensitive_as_feature,
            'missing_markers': list(self.missing_markers),
        }


class CsvCollector:
    """Reads one CSV, drops incomplete rows, one-hot encodes categoricals and
    standardizes numerics on the loaded rows"""

    def __init__(self, schema: DataSchema):
        self.schema = schema

    def collect(self, path) -> Dataset:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"CSV file not found: {path}")

        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
        frame.columns = [c.strip() for c in frame.columns]
        for column in self.schema.used_columns:
            if column not in frame.columns:
                raise SchemaError(f"column '{column}' not found in {path.name}", column=column)

        used = frame[self.schema.used_columns].apply(lambda col: col.str.strip())
        missing = used.isin(('',) + self.schema.missing_markers).any(axis=1)
        dropped = int(missing.sum())
        used = used.loc[~missing]
        row_ids = np.flatnonzero(~missing.to_numpy())
        if used.empty:
            raise ValidationError(f"no complete rows left in {path.name}")
        logger.info(f"  {path.name}: {len(used)} rows kept, {dropped} dropped for missing values")

        labels = self._binary_column(used[self.schema.label_column], self.schema.positive_label, 'label')
        sensitive = self._binary_column(used[self.schema.sensitive_column], self.schema.privileged_value, 'sensitive')

        blocks, names, numeric_mask, means, scales = [], [], [], [], []
        for name, kind in self.schema.feature_columns:
            if kind == 'numeric':
                values = pd.to_numeric(used[name], errors='coerce')
                bad = used[name][values.isna()].unique().tolist()
                if bad:
                    raise ValidationError(f"numeric column '{name}' has non-numeric values: {bad[:10]}")
                raw = values.to_numpy(dtype=float)
                mean = raw.mean()
                scale = raw.std()
                if scale == 0:
                    scale = 1.0
                blocks.append(((raw - mean) / scale)[:, None])
                names.append(name)
                numeric_mask.append(True)
                means.append(mean)
                scales.append(scale)
            else:
                categories = sorted(used[name].unique().tolist())
                onehot = np.stack([(used[name] == c).to_numpy(dtype=float) for c in categories], axis=1)
                blocks.append(onehot)
                names.extend(f"{name}={c}" for c in categories)
                numeric_mask.extend([False] * len(categories))
                means.extend([0.0] * len(categories))
                scales.extend([1.0] * len(categories))

        sensitive_index = None
        if self.schema.include_sensitive_as_feature:
            sensitive_index = len(names)
            blocks.append(sensitive[:, None].astype(float))
            names.append(f"{self.schema.sensitive_column}={self.schema.privileged_value}")
            numeric_mask.append(False)
            means.append(0.0)
            scales.append(1.0)

        return Dataset(
            features=np.hstack(blocks),
            labels=labels,
            sensitive=sensitive,
            row_ids=row_ids,
            feature_names=tuple(names),
            numeric_mask=np.array(numeric_mask),
            feature_means=np.array(means),
            feature_scales=np.array(scales),
            sensitive_feature_index=sensitive_index,
            provenance=f"csv:{path.name} rows={len(used)} dropped_missing={dropped}",
        )

    @staticmethod
    def _binary_column(column: pd.Series, positive: str, role: str) -> np.ndarray:
        distinct = sorted(column.unique().tolist())
        if len(distinct) > 2 or (len(distinct) == 2 and positive not in distinct):
            raise ValidationError(
                f"{role} column '{column.name}' must be binary with '{positive}' as one value, found {distinct}"
            )
        return (column == positive).to_numpy(dtype=np.int64)


def load_csv(path, schema: DataSchema) -> Dataset:
    return CsvCollector(schema).collect(path)


if __name__ == '__main__':
    import sys
    logging.basicConfig(level=logging.INFO, format='%(message)s')
    schema = DataSchema(
        label_column='income', positive_label='>50K',
        sensitive_column='sex', privileged_value='Male',
        feature_columns=(('age', 'numeric'), ('education', 'categorical')),
    )
    ds = load_csv(sys.argv[1], schema)
    print(f"Loaded {ds.n} rows x {ds.d} features")
