"""Group cost metrics and the discrimination values built from them.

Every discrimination is privileged minus unprivileged:

    Disc(metric) = C(metric, a1) - C(metric, a0)

Costs whose conditioning set is empty are None and make the record
undefined instead of raising.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from scipy.stats import rankdata

from collectors.dataset import A0, A1
from errors import ConfigError, ValidationError


class MetricKind(str, Enum):
    FPR = 'FPR'
    FNR = 'FNR'
    EO = 'EO'
    ZOL = 'ZOL'
    SD = 'SD'
    AUC = 'AUC'

    @classmethod
    def parse(cls, token) -> 'MetricKind':
        if isinstance(token, cls):
            return token
        key = str(token).strip().upper()
        if key == 'TPR':
            return cls.EO
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown metric '{token}' (expected one of {[m.value for m in cls]})",
                              token=str(token)) from None


class LossKind(str, Enum):
    SL = 'SL'
    AL = 'AL'
    ZO = 'ZO'


def loss(kind: LossKind, y_hat, y):
    """Pointwise loss; works elementwise on arrays. ZO only accepts hard labels."""
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    kind = LossKind(kind)
    if kind == LossKind.SL:
        out = (y_hat - y) ** 2
    elif kind == LossKind.AL:
        out = np.abs(y_hat - y)
    else:
        if np.any((y_hat != 0) & (y_hat != 1)):
            raise ValidationError("zero-one loss needs hard labels in {0, 1}")
        out = (y_hat != y).astype(float)
    return float(out) if out.ndim == 0 else out


def _conditional_mean(values: np.ndarray, mask: np.ndarray) -> Optional[float]:
    count = int(mask.sum())
    if count == 0:
        return None
    return float(values[mask].sum()) / count


def group_cost(metric: MetricKind, labels_hat, labels, sensitive, group: int) -> Optional[float]:
    """C(metric, group) from hard predictions; None when the conditioning set is empty"""
    metric = MetricKind(metric)
    labels_hat = np.asarray(labels_hat, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    in_group = np.asarray(sensitive) == group
    if metric == MetricKind.FPR:
        return _conditional_mean(labels_hat, in_group & (labels == 0))
    if metric == MetricKind.FNR:
        tpr = _conditional_mean(labels_hat, in_group & (labels == 1))
        return None if tpr is None else 1.0 - tpr
    if metric == MetricKind.EO:
        return _conditional_mean(labels_hat, in_group & (labels == 1))
    if metric == MetricKind.ZOL:
        return _conditional_mean((labels_hat != labels).astype(np.int64), in_group)
    if metric == MetricKind.SD:
        return _conditional_mean(labels_hat, in_group)
    raise ValidationError("AUC is a score metric, use auc()")


def auc(scores, labels) -> Optional[float]:
    """Mann-Whitney AUC, ties count one half; None when a class is absent"""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    positive = labels == 1
    n_pos = int(positive.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores, method='average')
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class DiscriminationRecord:
    metric: MetricKind
    cost_a0: Optional[float]
    cost_a1: Optional[float]
    disc: Optional[float]
    n_a0: int
    n_a1: int

    @property
    def defined(self) -> bool:
        return self.disc is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'metric': self.metric.value,
            'cost_a0': self.cost_a0,
            'cost_a1': self.cost_a1,
            'disc': self.disc,
            'n_a0': self.n_a0,
            'n_a1': self.n_a1,
            'defined': self.defined,
        }


def make_record(metric: MetricKind, cost_a0: Optional[float], cost_a1: Optional[float],
                n_a0: int, n_a1: int) -> DiscriminationRecord:
    disc = None if cost_a0 is None or cost_a1 is None else cost_a1 - cost_a0
    return DiscriminationRecord(MetricKind(metric), cost_a0, cost_a1, disc, n_a0, n_a1)


def discrimination(metric: MetricKind, labels_hat, scores, labels, sensitive) -> DiscriminationRecord:
    """AUC ranks scores within each group; every other metric uses hard labels"""
    metric = MetricKind(metric)
    labels = np.asarray(labels, dtype=np.int64)
    sensitive = np.asarray(sensitive)
    if labels_hat is not None and len(labels_hat) != labels.shape[0]:
        raise ValidationError(f"{len(labels_hat)} predictions for {labels.shape[0]} labels")
    if sensitive.shape[0] != labels.shape[0]:
        raise ValidationError(f"{sensitive.shape[0]} sensitive values for {labels.shape[0]} labels")

    n_a0 = int((sensitive == A0).sum())
    n_a1 = int((sensitive == A1).sum())
    if metric == MetricKind.AUC:
        if scores is None:
            raise ValidationError("AUC needs prediction scores")
        scores = np.asarray(scores, dtype=float)
        costs = [auc(scores[sensitive == g], labels[sensitive == g]) for g in (A0, A1)]
    elif metric == MetricKind.FNR:
        # FNR = 1 - TPR; the difference is taken from the TPR costs so Disc(EO) + Disc(FNR) == 0 exactly
        tpr = [group_cost(MetricKind.EO, labels_hat, labels, sensitive, g) for g in (A0, A1)]
        if None in tpr:
            return make_record(metric, *[None if t is None else 1.0 - t for t in tpr], n_a0, n_a1)
        return DiscriminationRecord(metric, 1.0 - tpr[0], 1.0 - tpr[1], tpr[0] - tpr[1], n_a0, n_a1)
    else:
        costs = [group_cost(metric, labels_hat, labels, sensitive, g) for g in (A0, A1)]
    return make_record(metric, costs[0], costs[1], n_a0, n_a1)
