"""Collectors package"""

from .dataset import A0, A1, GROUP_NAMES, Dataset, GroupStats, group_stats, parse_group
from .csv_collector import CsvCollector, DataSchema, load_csv
from .synthetic_collector import SyntheticCollector, generate_synthetic
from .rebalancer import rebalance_outcome_rates

__all__ = [
    'A0',
    'A1',
    'GROUP_NAMES',
    'Dataset',
    'GroupStats',
    'group_stats',
    'parse_group',
    'CsvCollector',
    'DataSchema',
    'load_csv',
    'SyntheticCollector',
    'generate_synthetic',
    'rebalance_outcome_rates',
]
