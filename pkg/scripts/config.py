"""Experiment configuration: JSON document <-> ExperimentConfig"""
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from analyzers.decomposition import DecompositionMode
from analyzers.fairness_metrics import MetricKind
from collectors.csv_collector import DataSchema
from collectors.dataset import A0, A1, GROUP_NAMES, parse_group
from errors import ConfigError, ValidationError
from learners.base import LearnerSpec, LogRegSpec, spec_from_dict, spec_to_dict
from sampling.samplers import DEFAULT_REPEATS

EXPERIMENTS = ('ssb', 'urb', 'mitigation', 'augmentation')
EVAL_MODES = ('holdout', 'full', 'cv')
GROWTH_STRATEGIES = ('collect', 'oversample', 'smote')
MITIGATIONS = ('none', 'reweighing')

DEFAULT_SIZES = (30, 100, 300, 1000)
DEFAULT_SPLITS = (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99)
DEFAULT_GROWING_SIZES = (2, 5, 10, 20, 50, 100)
DEFAULT_AUGMENTATION_REPEATS = 50


def _check_keys(data: Dict[str, Any], allowed, section: str) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"'{section}' must be an object", token=section)
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key '{unknown[0]}' in {section}", token=unknown[0])


def _dataclass_from(cls, data: Dict[str, Any], section: str):
    _check_keys(data, [f.name for f in fields(cls)], section)
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{section}: {exc}", token=section) from None


@dataclass(frozen=True)
class SyntheticSpec:
    n0: int = 2000
    n1: int = 4000
    pos_rate_a0: float = 0.1
    pos_rate_a1: float = 0.9
    d: int = 2
    signal: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class RebalanceSpec:
    target_rate_a1: float
    target_rate_a0: float
    seed: int = 0


@dataclass(frozen=True)
class DataConfig:
    source: str = 'synthetic'
    path: Optional[str] = None
    schema: Optional[DataSchema] = None
    synthetic: Optional[SyntheticSpec] = field(default_factory=SyntheticSpec)
    rebalance: Optional[RebalanceSpec] = None

    def __post_init__(self):
        if self.source not in ('csv', 'synthetic'):
            raise ConfigError(f"data.source must be csv or synthetic, got '{self.source}'", token=str(self.source))
        if self.source == 'csv' and (not self.path or self.schema is None):
            raise ConfigError("csv data needs both data.path and data.schema", token='path')

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DataConfig':
        _check_keys(data, ('source', 'path', 'schema', 'synthetic', 'rebalance'), 'data')
        source = data.get('source', 'synthetic')
        schema = DataSchema.from_dict(data['schema']) if data.get('schema') is not None else None
        synthetic = None
        if source == 'synthetic':
            synthetic = _dataclass_from(SyntheticSpec, data.get('synthetic') or {}, 'data.synthetic')
        rebalance = None
        if data.get('rebalance') is not None:
            rebalance = _dataclass_from(RebalanceSpec, data['rebalance'], 'data.rebalance')
        return cls(source=source, path=data.get('path'), schema=schema, synthetic=synthetic, rebalance=rebalance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source': self.source,
            'path': self.path,
            'schema': None if self.schema is None else self.schema.to_dict(),
            'synthetic': None if self.synthetic is None else asdict(self.synthetic),
            'rebalance': None if self.rebalance is None else asdict(self.rebalance),
        }


@dataclass(frozen=True)
class GrowingConfig:
    fixed_group: int = A1
    fixed_n: int = 100
    growing_sizes: Tuple[int, ...] = DEFAULT_GROWING_SIZES
    selective: bool = False
    strategy: str = 'collect'
    smote_k: int = 5

    def __post_init__(self):
        object.__setattr__(self, 'fixed_group', parse_group(self.fixed_group))
        object.__setattr__(self, 'growing_sizes', tuple(int(s) for s in self.growing_sizes))
        if self.strategy not in GROWTH_STRATEGIES:
            raise ConfigError(f"growing.strategy must be one of {GROWTH_STRATEGIES}, got '{self.strategy}'",
                              token=str(self.strategy))
        if self.selective and self.strategy != 'collect':
            raise ConfigError("growing.selective only applies to the collect strategy", token='selective')
        if self.smote_k < 1:
            raise ConfigError(f"growing.smote_k must be >= 1, got {self.smote_k}", token='smote_k')

    @property
    def growing_group(self) -> int:
        return A0 if self.fixed_group == A1 else A1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'fixed_group': GROUP_NAMES[self.fixed_group],
            'fixed_n': self.fixed_n,
            'growing_sizes': list(self.growing_sizes),
            'selective': self.selective,
            'strategy': self.strategy,
            'smote_k': self.smote_k,
        }


@dataclass(frozen=True)
class EvalConfig:
    mode: str = 'holdout'
    holdout_fraction: float = 0.5
    folds: int = 3

    def __post_init__(self):
        if self.mode not in EVAL_MODES:
            raise ConfigError(f"eval.mode must be one of {EVAL_MODES}, got '{self.mode}'", token=str(self.mode))
        if not 0 < self.holdout_fraction < 1:
            raise ConfigError(f"eval.holdout_fraction must lie in (0, 1), got {self.holdout_fraction}",
                              token='holdout_fraction')
        if self.folds < 2:
            raise ConfigError(f"eval.folds must be >= 2, got {self.folds}", token='folds')


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one sweep needs; echoed verbatim into its result document"""
    experiment: str = 'ssb'
    data: DataConfig = field(default_factory=DataConfig)
    learner: LearnerSpec = field(default_factory=LogRegSpec)
    metrics: Tuple[MetricKind, ...] = tuple(MetricKind)
    sizes: Tuple[int, ...] = DEFAULT_SIZES
    splits: Tuple[float, ...] = DEFAULT_SPLITS
    sample_size: int = 1000
    growing: GrowingConfig = field(default_factory=GrowingConfig)
    repeats: int = DEFAULT_REPEATS
    mitigation: str = 'none'
    mitigation_protocol: str = 'ssb'
    eval: EvalConfig = field(default_factory=EvalConfig)
    decomposition_mode: DecompositionMode = DecompositionMode.LABEL
    importance_repeats: int = 5
    master_seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'metrics', tuple(MetricKind.parse(m) for m in self.metrics))
        object.__setattr__(self, 'sizes', tuple(int(s) for s in self.sizes))
        object.__setattr__(self, 'splits', tuple(float(s) for s in self.splits))
        object.__setattr__(self, 'decomposition_mode', _parse_mode(self.decomposition_mode))
        self.validate()

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got '{self.experiment}'",
                              token=str(self.experiment))
        if not self.metrics:
            raise ConfigError("at least one metric is required", token='metrics')
        if len(set(self.metrics)) != len(self.metrics):
            raise ConfigError("metrics are listed twice", token='metrics')
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}", token='repeats')
        if self.importance_repeats < 1:
            raise ConfigError(f"importance_repeats must be >= 1, got {self.importance_repeats}",
                              token='importance_repeats')
        if self.mitigation not in MITIGATIONS:
            raise ConfigError(f"mitigation must be one of {MITIGATIONS}, got '{self.mitigation}'",
                              token=str(self.mitigation))
        if self.mitigation_protocol not in ('ssb', 'urb'):
            raise ConfigError(f"mitigation_protocol must be ssb or urb, got '{self.mitigation_protocol}'",
                              token=str(self.mitigation_protocol))
        if self.eval.mode == 'cv' and self.experiment != 'augmentation':
            raise ConfigError("cross-validated evaluation is only available for augmentation", token='cv')
        if self.protocol_name == 'ssb':
            if not self.sizes or any(m < 2 for m in self.sizes) or len(set(self.sizes)) != len(self.sizes):
                raise ConfigError(f"sizes must be distinct integers >= 2, got {list(self.sizes)}", token='sizes')
        if self.protocol_name == 'urb':
            if not self.splits or any(not 0 < f < 1 for f in self.splits) or len(set(self.splits)) != len(self.splits):
                raise ConfigError(f"splits must be distinct fractions in (0, 1), got {list(self.splits)}",
                                  token='splits')
            if self.sample_size < 2:
                raise ConfigError(f"sample_size must be >= 2, got {self.sample_size}", token='sample_size')
        if self.experiment == 'augmentation':
            sizes = list(self.growing.growing_sizes)
            if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
                raise ConfigError(f"growing_sizes must be strictly increasing positive integers, got {sizes}",
                                  token='growing_sizes')
            if self.growing.fixed_n < 1:
                raise ConfigError(f"growing.fixed_n must be >= 1, got {self.growing.fixed_n}", token='fixed_n')

    @property
    def protocol_name(self) -> str:
        """Which sampling protocol drives the sweep: ssb, urb or augmentation"""
        if self.experiment == 'mitigation':
            return self.mitigation_protocol
        return self.experiment

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        _check_keys(data, [f.name for f in fields(cls)], 'config')
        kwargs = dict(data)
        experiment = kwargs.get('experiment', 'ssb')
        if 'data' in kwargs:
            kwargs['data'] = DataConfig.from_dict(kwargs['data'] or {})
        if 'learner' in kwargs:
            kwargs['learner'] = spec_from_dict(kwargs['learner'] or {})
        if 'growing' in kwargs:
            kwargs['growing'] = _dataclass_from(GrowingConfig, kwargs['growing'] or {}, 'growing')
        if 'eval' in kwargs:
            kwargs['eval'] = _dataclass_from(EvalConfig, kwargs['eval'] or {}, 'eval')
        if 'repeats' not in kwargs and experiment == 'augmentation':
            kwargs['repeats'] = DEFAULT_AUGMENTATION_REPEATS
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"config: {exc}", token='config') from None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'experiment': self.experiment,
            'data': self.data.to_dict(),
            'learner': spec_to_dict(self.learner),
            'metrics': [m.value for m in self.metrics],
            'sizes': list(self.sizes),
            'splits': list(self.splits),
            'sample_size': self.sample_size,
            'growing': self.growing.to_dict(),
            'repeats': self.repeats,
            'mitigation': self.mitigation,
            'mitigation_protocol': self.mitigation_protocol,
            'eval': asdict(self.eval),
            'decomposition_mode': self.decomposition_mode.value,
            'importance_repeats': self.importance_repeats,
            'master_seed': self.master_seed,
            'output': self.output,
        }

    def with_overrides(self, **overrides) -> 'ExperimentConfig':
        """Copy with the given fields replaced; None values are ignored"""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _parse_mode(value) -> DecompositionMode:
    try:
        return DecompositionMode(value)
    except ValueError:
        raise ConfigError(f"decomposition_mode must be label or score, got '{value}'", token=str(value)) from None


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.from_dict(data)
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}", token=str(path))
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path.name} is not valid JSON: {exc}", token=str(path)) from None
    return parse_config(data)
