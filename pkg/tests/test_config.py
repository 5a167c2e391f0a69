import json

import pytest

from analyzers import DecompositionMode, MetricKind
from collectors import A0, A1
from config import (
    DEFAULT_AUGMENTATION_REPEATS,
    DataConfig,
    EvalConfig,
    ExperimentConfig,
    GrowingConfig,
    load_config,
    parse_config,
)
from errors import ConfigError, ValidationError
from learners import TreeSpec
from sampling import DEFAULT_REPEATS


def test_defaults_are_valid():
    config = ExperimentConfig()
    assert config.experiment == 'ssb'
    assert config.metrics == tuple(MetricKind)
    assert config.repeats == DEFAULT_REPEATS
    assert config.decomposition_mode == DecompositionMode.LABEL


def test_dict_round_trip():
    config = parse_config({
        'experiment': 'augmentation',
        'learner': {'kind': 'tree', 'max_depth': 3},
        'metrics': ['sd', 'tpr'],
        'growing': {'fixed_group': 'a1', 'fixed_n': 40, 'growing_sizes': [2, 10], 'selective': True},
        'eval': {'mode': 'cv', 'folds': 4},
        'decomposition_mode': 'score',
    })
    assert config.learner == TreeSpec(max_depth=3)
    assert config.metrics == (MetricKind.SD, MetricKind.EO)
    assert config.growing.growing_group == A0
    assert config.repeats == DEFAULT_AUGMENTATION_REPEATS
    assert parse_config(config.to_dict()) == config
    assert json.loads(json.dumps(config.to_dict()))['growing']['fixed_group'] == 'a1'


def test_unknown_key_is_named():
    with pytest.raises(ConfigError) as info:
        parse_config({'experiment': 'ssb', 'sizez': [10]})
    assert info.value.token == 'sizez'
    with pytest.raises(ConfigError) as info:
        parse_config({'eval': {'mode': 'full', 'fold': 3}})
    assert info.value.token == 'fold'


@pytest.mark.parametrize('data, token', [
    ({'experiment': 'bias'}, 'bias'),
    ({'metrics': ['FPR', 'F1']}, 'F1'),
    ({'metrics': []}, 'metrics'),
    ({'sizes': [10, 1]}, 'sizes'),
    ({'experiment': 'urb', 'splits': [0.5, 1.0]}, 'splits'),
    ({'repeats': 0}, 'repeats'),
    ({'mitigation': 'fairlearn'}, 'fairlearn'),
    ({'eval': {'mode': 'cv'}}, 'cv'),
    ({'learner': {'kind': 'svm'}}, 'svm'),
    ({'decomposition_mode': 'mse'}, 'mse'),
])
def test_invalid_values(data, token):
    with pytest.raises(ConfigError) as info:
        parse_config(data)
    assert info.value.token == token


def test_mitigation_validates_its_protocol():
    parse_config({'experiment': 'mitigation', 'mitigation_protocol': 'urb', 'sizes': [1]})
    with pytest.raises(ConfigError):
        parse_config({'experiment': 'mitigation', 'mitigation_protocol': 'urb', 'splits': [0.0]})


def test_growing_config_checks():
    with pytest.raises(ConfigError):
        GrowingConfig(strategy='mixup')
    with pytest.raises(ConfigError):
        GrowingConfig(strategy='smote', selective=True)
    with pytest.raises(ValidationError):
        GrowingConfig(fixed_group='a2')
    assert GrowingConfig(fixed_group=0).growing_group == A1
    with pytest.raises(ConfigError):
        parse_config({'experiment': 'augmentation', 'growing': {'growing_sizes': [5, 5]}})


def test_eval_config_checks():
    with pytest.raises(ConfigError):
        EvalConfig(holdout_fraction=1.0)
    with pytest.raises(ConfigError):
        EvalConfig(folds=1)


def test_csv_source_needs_schema():
    with pytest.raises(ConfigError):
        DataConfig(source='csv', path='adult.csv')
    data = DataConfig.from_dict({
        'source': 'csv',
        'path': 'adult.csv',
        'schema': {
            'label_column': 'income', 'positive_label': '>50K',
            'sensitive_column': 'sex', 'privileged_value': 'Male',
            'feature_columns': [['age', 'numeric']],
        },
    })
    assert data.synthetic is None
    assert data.schema.sensitive_column == 'sex'


def test_overrides_skip_none():
    config = ExperimentConfig().with_overrides(master_seed=7, repeats=None, sizes=(10, 20))
    assert config.master_seed == 7
    assert config.repeats == DEFAULT_REPEATS
    assert config.sizes == (10, 20)


def test_overrides_are_validated():
    with pytest.raises(ConfigError):
        ExperimentConfig().with_overrides(repeats=0)


def test_load_config(tmp_path):
    path = tmp_path / 'c.json'
    path.write_text(json.dumps({'experiment': 'urb', 'sample_size': 200, 'splits': [0.1, 0.5]}))
    config = load_config(path)
    assert config.splits == (0.1, 0.5)
    assert config.growing.fixed_group == A1
    path.write_text('{not json')
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'missing.json')
