"""Learners package"""
from .base import (
    LABEL_THRESHOLD,
    ConstantModel,
    ForestSpec,
    KnnSpec,
    LearnerSpec,
    LogRegSpec,
    Model,
    TreeSpec,
    spec_from_dict,
    spec_to_dict,
)
from .fitting import fit, predict_batch
from .forest import ForestModel, bootstrap_counts, tree_seed
from .knn import KnnModel
from .logistic import LogisticModel
from .tree import TreeModel

__all__ = [
    'LABEL_THRESHOLD',
    'ConstantModel',
    'ForestSpec',
    'KnnSpec',
    'LearnerSpec',
    'LogRegSpec',
    'Model',
    'TreeSpec',
    'spec_from_dict',
    'spec_to_dict',
    'fit',
    'predict_batch',
    'ForestModel',
    'bootstrap_counts',
    'tree_seed',
    'KnnModel',
    'LogisticModel',
    'TreeModel',
]
