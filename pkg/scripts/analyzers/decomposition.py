"""Bias-variance decomposition of discrimination over replicate ensembles.

A PredictionTable holds k replicate predictions for each of n evaluation
points. With zero noise the optimal prediction is the observed label y, and
for every point

    label mode:  mean ZO loss   = bias + (1 - 2*bias) * variance
    score mode:  mean SQ loss   = bias + variance

where bias compares the main prediction (majority label / mean score) with
y and variance is the mean loss of the replicates against the main
prediction. Group means of these terms, differenced a1 minus a0, split the
expected-loss discrimination into a bias part and a (net) variance part;
differencing two such reports splits SSB and URB the same way.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from collectors.dataset import A0, A1, GROUP_NAMES, Dataset
from errors import SchemaError, ValidationError
from learners.base import LABEL_THRESHOLD, Model
from learners.fitting import predict_batch
from .fairness_metrics import DiscriminationRecord, MetricKind, discrimination, make_record

logger = logging.getLogger(__name__)


class DecompositionMode(str, Enum):
    LABEL = 'label'
    SCORE = 'score'


def _frozen(array) -> Optional[np.ndarray]:
    if array is None:
        return None
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PredictionTable:
    """k x n replicate predictions over a fixed evaluation set.

    Label mode decomposes `pred_labels`, score mode `pred_scores`; the other
    matrix may be None (tables read from CSV carry only one of them).
    """
    eval_ids: np.ndarray
    labels: np.ndarray
    pred_labels: Optional[np.ndarray]
    pred_scores: Optional[np.ndarray]
    mode: DecompositionMode = DecompositionMode.LABEL

    def __post_init__(self):
        mode = DecompositionMode(self.mode)
        labels = np.asarray(self.labels).astype(np.int64)
        n = labels.shape[0]
        if np.any((labels != 0) & (labels != 1)):
            raise ValidationError("table labels must be 0/1")
        if np.asarray(self.eval_ids).shape != (n,):
            raise ValidationError(f"{len(self.eval_ids)} eval ids for {n} labels")
        pred_labels = None if self.pred_labels is None else np.atleast_2d(np.asarray(self.pred_labels)).astype(np.int64)
        pred_scores = None if self.pred_scores is None else np.atleast_2d(np.asarray(self.pred_scores, dtype=float))
        for name, matrix in (('pred_labels', pred_labels), ('pred_scores', pred_scores)):
            if matrix is not None and (matrix.shape[0] < 1 or matrix.shape[1] != n):
                raise ValidationError(f"{name} has shape {matrix.shape}, expected (k >= 1, {n})")
        if mode == DecompositionMode.LABEL:
            if pred_labels is None:
                raise ValidationError("label-mode table needs replicate labels")
            if np.any((pred_labels != 0) & (pred_labels != 1)):
                raise ValidationError("label-mode replicate predictions must be 0/1")
        else:
            if pred_scores is None:
                raise ValidationError("score-mode table needs replicate scores")
            if not np.all((pred_scores >= 0) & (pred_scores <= 1)):
                raise ValidationError("score-mode replicate predictions must lie in [0, 1]")
        if pred_labels is not None and pred_scores is not None and pred_labels.shape != pred_scores.shape:
            raise ValidationError("replicate label and score matrices differ in shape")

        object.__setattr__(self, 'mode', mode)
        object.__setattr__(self, 'eval_ids', _frozen(np.asarray(self.eval_ids).astype(np.int64)))
        object.__setattr__(self, 'labels', _frozen(labels))
        object.__setattr__(self, 'pred_labels', _frozen(pred_labels))
        object.__setattr__(self, 'pred_scores', _frozen(pred_scores))

    @property
    def values(self) -> np.ndarray:
        """The matrix this table's mode decomposes"""
        return self.pred_labels if self.mode == DecompositionMode.LABEL else self.pred_scores

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class PointDecomposition:
    eval_ids: np.ndarray
    mode: DecompositionMode
    main_pred: np.ndarray
    noise: np.ndarray
    bias: np.ndarray
    variance: np.ndarray
    net_variance: np.ndarray
    loss: np.ndarray

    @property
    def residual(self) -> np.ndarray:
        return np.abs(self.loss - (self.noise + self.bias + self.net_variance))


@dataclass(frozen=True)
class GroupDecomposition:
    n: int
    noise: float
    bias: float
    variance: float
    raw_variance: float
    loss: float
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'noise': self.noise,
            'bias': self.bias,
            'variance': self.variance,
            'raw_variance': self.raw_variance,
            'loss': self.loss,
            'residual': self.residual,
        }


@dataclass(frozen=True)
class DecompositionReport:
    """Per-group mean noise / bias / net variance / loss and their a1 - a0 deltas.

    `variance` is the net variance. Deltas are None when a group is empty.
    """
    mode: DecompositionMode
    eval_ids: np.ndarray
    groups: Dict[int, Optional[GroupDecomposition]]
    max_point_residual: float

    def _delta(self, field: str) -> Optional[float]:
        a0, a1 = self.groups[A0], self.groups[A1]
        if a0 is None or a1 is None:
            return None
        return getattr(a1, field) - getattr(a0, field)

    @property
    def delta_noise(self) -> Optional[float]:
        return self._delta('noise')

    @property
    def delta_bias(self) -> Optional[float]:
        return self._delta('bias')

    @property
    def delta_variance(self) -> Optional[float]:
        return self._delta('variance')

    @property
    def delta_loss(self) -> Optional[float]:
        return self._delta('loss')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode.value,
            'groups': {GROUP_NAMES[g]: (None if rep is None else rep.to_dict()) for g, rep in self.groups.items()},
            'delta_noise': self.delta_noise,
            'delta_bias': self.delta_bias,
            'delta_variance': self.delta_variance,
            'delta_loss': self.delta_loss,
            'max_point_residual': self.max_point_residual,
        }


@dataclass(frozen=True)
class BiasVarianceSplit:
    """Difference of two reports' deltas, split into bias and net-variance parts"""
    bias_term: Optional[float]
    variance_term: Optional[float]

    @property
    def total(self) -> Optional[float]:
        if self.bias_term is None or self.variance_term is None:
            return None
        return self.bias_term + self.variance_term

    def to_dict(self) -> Dict[str, Any]:
        return {'bias_term': self.bias_term, 'variance_term': self.variance_term, 'total': self.total}


def build_table(models: Sequence[Model], eval_set: Dataset,
                mode: DecompositionMode = DecompositionMode.LABEL) -> PredictionTable:
    if not models:
        raise ValidationError("build_table needs at least one model")
    labels, scores = zip(*(predict_batch(model, eval_set) for model in models))
    return PredictionTable(
        eval_ids=eval_set.row_ids,
        labels=eval_set.labels,
        pred_labels=np.vstack(labels),
        pred_scores=np.vstack(scores),
        mode=mode,
    )


def main_prediction(table: PredictionTable) -> np.ndarray:
    """Label mode: majority vote, an exact half vote goes to 1. Score mode: mean score."""
    if table.mode == DecompositionMode.LABEL:
        votes = table.pred_labels.sum(axis=0)
        return (2 * votes >= table.k).astype(np.int64)
    return table.pred_scores.mean(axis=0)


def decompose_points(table: PredictionTable) -> PointDecomposition:
    main = main_prediction(table)
    values = table.values
    y = table.labels
    if table.mode == DecompositionMode.LABEL:
        bias = (main != y).astype(float)
        variance = (values != main).sum(axis=0) / table.k
        net = (1.0 - 2.0 * bias) * variance
        point_loss = (values != y).sum(axis=0) / table.k
    else:
        bias = (main - y) ** 2
        variance = ((values - main) ** 2).mean(axis=0)
        net = variance
        point_loss = ((values - y) ** 2).mean(axis=0)
    return PointDecomposition(
        eval_ids=table.eval_ids,
        mode=table.mode,
        main_pred=main,
        noise=np.zeros(table.n),
        bias=bias,
        variance=variance,
        net_variance=net,
        loss=point_loss,
    )


def aggregate_groups(points: PointDecomposition, sensitive) -> DecompositionReport:
    sensitive = np.asarray(sensitive).astype(np.int64)
    if sensitive.shape != points.loss.shape:
        raise ValidationError(f"{sensitive.shape[0]} sensitive values for {points.loss.shape[0]} points")
    groups: Dict[int, Optional[GroupDecomposition]] = {}
    for group in (A0, A1):
        mask = sensitive == group
        count = int(mask.sum())
        if count == 0:
            groups[group] = None
            continue
        noise = float(points.noise[mask].mean())
        bias = float(points.bias[mask].mean())
        net = float(points.net_variance[mask].mean())
        group_loss = float(points.loss[mask].mean())
        groups[group] = GroupDecomposition(
            n=count,
            noise=noise,
            bias=bias,
            variance=net,
            raw_variance=float(points.variance[mask].mean()),
            loss=group_loss,
            residual=abs(group_loss - (noise + bias + net)),
        )
    max_residual = float(points.residual.max()) if points.loss.size else 0.0
    return DecompositionReport(points.mode, points.eval_ids, groups, max_residual)


def decompose(table: PredictionTable, sensitive) -> DecompositionReport:
    return aggregate_groups(decompose_points(table), sensitive)


def _disc_value(record: Union[DiscriminationRecord, float, None]) -> Optional[float]:
    if record is None:
        return None
    if isinstance(record, DiscriminationRecord):
        return record.disc
    return float(record)


def _difference(current, reference) -> Optional[float]:
    if isinstance(current, DiscriminationRecord) and isinstance(reference, DiscriminationRecord):
        if current.metric != reference.metric:
            raise ValidationError(f"cannot compare {current.metric.value} with {reference.metric.value}")
    value = _disc_value(current)
    ref = _disc_value(reference)
    if value is None or ref is None:
        return None
    return value - ref


def ssb_estimate(disc_m, disc_M) -> Optional[float]:
    """Disc at size m minus Disc at the reference size M; None if either is undefined.

    Pass main-prediction records for the ensemble form, or single-training-set
    records for the per-sample form.
    """
    return _difference(disc_m, disc_M)


def urb_estimate(disc_ratio, disc_population_ratio) -> Optional[float]:
    """Disc under a group split minus Disc under the population's own split"""
    return _difference(disc_ratio, disc_population_ratio)


def ssb_decomposition(report_m: DecompositionReport, report_M: DecompositionReport) -> BiasVarianceSplit:
    """(delta_bias_m - delta_bias_M, delta_variance_m - delta_variance_M); also serves URB"""
    if report_m.mode != report_M.mode:
        raise ValidationError(f"reports use different modes ({report_m.mode.value} vs {report_M.mode.value})")
    if not np.array_equal(report_m.eval_ids, report_M.eval_ids):
        raise ValidationError("reports were computed on different evaluation sets")
    bias_m, bias_M = report_m.delta_bias, report_M.delta_bias
    var_m, var_M = report_m.delta_variance, report_M.delta_variance
    bias_term = None if bias_m is None or bias_M is None else bias_m - bias_M
    variance_term = None if var_m is None or var_M is None else var_m - var_M
    return BiasVarianceSplit(bias_term, variance_term)


def main_prediction_discrimination(table: PredictionTable, sensitive, metric: MetricKind,
                                   report: DecompositionReport = None) -> DiscriminationRecord:
    """Disc of the ensemble's main prediction.

    For ZOL the group cost is the ensemble's expected loss (zero-one in label
    mode, squared in score mode), so the value equals delta_bias +
    delta_variance of the report. Other metrics use the main prediction
    itself: majority labels, or mean scores thresholded at 0.5.
    """
    metric = MetricKind(metric)
    sensitive = np.asarray(sensitive).astype(np.int64)
    if metric == MetricKind.ZOL:
        report = report or decompose(table, sensitive)
        costs = [None if report.groups[g] is None else report.groups[g].loss for g in (A0, A1)]
        return make_record(metric, costs[0], costs[1], int((sensitive == A0).sum()), int((sensitive == A1).sum()))

    main = main_prediction(table)
    if table.mode == DecompositionMode.LABEL:
        labels_hat = main
        scores = table.pred_scores.mean(axis=0) if table.pred_scores is not None else main.astype(float)
    else:
        labels_hat = (main >= LABEL_THRESHOLD).astype(np.int64)
        scores = main
    return discrimination(metric, labels_hat, scores, table.labels, sensitive)


def write_table_csv(table: PredictionTable, path) -> None:
    """Columns row_id,label,r0..r{k-1}; r holds labels in label mode, scores in score mode"""
    frame = pd.DataFrame({'row_id': table.eval_ids, 'label': table.labels})
    for r, row in enumerate(table.values):
        frame[f"r{r}"] = row
    frame.to_csv(path, index=False, float_format='%.17g')


def read_table_csv(path, mode: DecompositionMode = DecompositionMode.LABEL) -> PredictionTable:
    path = Path(path)
    mode = DecompositionMode(mode)
    if not path.exists():
        raise ValidationError(f"table file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    frame.columns = [c.strip() for c in frame.columns]
    for column in ('row_id', 'label'):
        if column not in frame.columns:
            raise SchemaError(f"table {path.name} has no '{column}' column", column=column)
    replicate_columns = [c for c in frame.columns if c not in ('row_id', 'label')]
    expected = [f"r{r}" for r in range(len(replicate_columns))]
    if not replicate_columns or replicate_columns != expected:
        raise SchemaError(f"table {path.name} replicate columns must be r0..r{{k-1}}, found {replicate_columns}",
                          column=replicate_columns[0] if replicate_columns else None)

    numeric = {column: _numeric_column(frame[column], column, path.name) for column in frame.columns}
    labels = numeric['label']
    bad = np.flatnonzero((labels != 0) & (labels != 1))
    if bad.size:
        raise ValidationError(f"{path.name} row {bad[0] + 1}: label {frame['label'].iloc[bad[0]]!r} is not 0/1")
    values = np.vstack([numeric[c] for c in replicate_columns])
    logger.info(f"  {path.name}: {values.shape[0]} replicates x {values.shape[1]} points ({mode.value} mode)")
    if mode == DecompositionMode.LABEL:
        bad_cell = np.argwhere((values != 0) & (values != 1))
        if bad_cell.size:
            r, i = bad_cell[0]
            raise ValidationError(f"{path.name} row {i + 1} column r{r}: label-mode predictions must be 0/1")
        return PredictionTable(numeric['row_id'].astype(np.int64), labels, values, None, mode)
    bad_cell = np.argwhere((values < 0) | (values > 1))
    if bad_cell.size:
        r, i = bad_cell[0]
        raise ValidationError(f"{path.name} row {i + 1} column r{r}: scores must lie in [0, 1]")
    return PredictionTable(numeric['row_id'].astype(np.int64), labels, None, values, mode)


def read_sensitive_csv(path, eval_ids: np.ndarray) -> np.ndarray:
    """Columns row_id,sensitive (1 = a1, 0 = a0), aligned to eval_ids"""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"sensitive file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    frame.columns = [c.strip() for c in frame.columns]
    for column in ('row_id', 'sensitive'):
        if column not in frame.columns:
            raise SchemaError(f"{path.name} has no '{column}' column", column=column)
    ids = _numeric_column(frame['row_id'], 'row_id', path.name).astype(np.int64)
    groups = _numeric_column(frame['sensitive'], 'sensitive', path.name)
    bad = np.flatnonzero((groups != A0) & (groups != A1))
    if bad.size:
        raise ValidationError(f"{path.name} row {bad[0] + 1}: sensitive value must be 0 or 1")
    lookup = dict(zip(ids.tolist(), groups.astype(np.int64).tolist()))
    missing = [int(i) for i in eval_ids if int(i) not in lookup]
    if missing:
        raise ValidationError(f"{path.name} lacks row ids {missing[:10]}")
    return np.array([lookup[int(i)] for i in eval_ids], dtype=np.int64)


def _numeric_column(column: pd.Series, name: str, source: str) -> np.ndarray:
    values = pd.to_numeric(column.str.strip(), errors='coerce')
    bad = np.flatnonzero(values.isna().to_numpy())
    if bad.size:
        raise ValidationError(f"{source} row {bad[0] + 1} column {name}: {column.iloc[bad[0]]!r} is not a number")
    return values.to_numpy(dtype=float)
