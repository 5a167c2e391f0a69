"""Analyzers package"""
from .fairness_metrics import (
    DiscriminationRecord,
    LossKind,
    MetricKind,
    auc,
    discrimination,
    group_cost,
    loss,
)
from .importance import linear_attribution, permutation_importance
from .decomposition import (
    BiasVarianceSplit,
    DecompositionMode,
    DecompositionReport,
    PointDecomposition,
    PredictionTable,
    aggregate_groups,
    build_table,
    decompose,
    decompose_points,
    main_prediction,
    main_prediction_discrimination,
    read_sensitive_csv,
    read_table_csv,
    ssb_decomposition,
    ssb_estimate,
    urb_estimate,
    write_table_csv,
)
from .summary import Summary, summarize

__all__ = [
    'DiscriminationRecord',
    'LossKind',
    'MetricKind',
    'auc',
    'discrimination',
    'group_cost',
    'loss',
    'linear_attribution',
    'permutation_importance',
    'BiasVarianceSplit',
    'DecompositionMode',
    'DecompositionReport',
    'PointDecomposition',
    'PredictionTable',
    'aggregate_groups',
    'build_table',
    'decompose',
    'decompose_points',
    'main_prediction',
    'main_prediction_discrimination',
    'read_sensitive_csv',
    'read_table_csv',
    'ssb_decomposition',
    'ssb_estimate',
    'urb_estimate',
    'write_table_csv',
    'Summary',
    'summarize',
]
