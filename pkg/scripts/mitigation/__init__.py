"""Mitigation package"""
from .reweighing import CELLS, ReweighingWeights, reweighing_weights
from .augmentation import STRATEGIES, grow_group, oversample_random, smote

__all__ = [
    'CELLS',
    'ReweighingWeights',
    'reweighing_weights',
    'STRATEGIES',
    'grow_group',
    'oversample_random',
    'smote',
]
