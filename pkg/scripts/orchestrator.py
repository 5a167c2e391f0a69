#!/usr/bin/env python3
"""Sampling-bias audit orchestrator - runs the SSB, URB, mitigation and augmentation sweeps"""
import logging
import os
import sys
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

# Add scripts to path
sys.path.insert(0, str(Path(__file__).parent))

from analyzers.decomposition import (
    DecompositionReport,
    PredictionTable,
    decompose,
    main_prediction_discrimination,
    ssb_decomposition,
)
from analyzers.fairness_metrics import DiscriminationRecord, MetricKind, discrimination
from analyzers.importance import linear_attribution, permutation_importance
from analyzers.summary import summarize
from collectors.csv_collector import load_csv
from collectors.dataset import A0, A1, GROUP_NAMES, Dataset, group_stats
from collectors.rebalancer import rebalance_outcome_rates
from collectors.synthetic_collector import generate_synthetic
from config import ExperimentConfig
from errors import ConfigError, ValidationError
from learners.base import LearnerSpec
from learners.fitting import fit, predict_batch
from learners.logistic import LogisticModel
from mitigation.augmentation import grow_group
from mitigation.reweighing import reweighing_weights
from results import IndexResult, MetricSeries, SweepResult, save_result
from sampling.determinism import (
    CV_STREAM,
    HOLDOUT_STREAM,
    IMPORTANCE_STREAM,
    LEARNER_STREAM,
    derive_seed,
    round_half_up,
)
from sampling.samplers import GrowingGroup, Protocol, Ratio, Sized, draw_family, draw_growing_families, \
    growing_group_series

logger = logging.getLogger(__name__)

THREADS_ENV = 'BIAS_AUDIT_THREADS'
UNMITIGATED = 'unmitigated'
REWEIGHING = 'reweighing'


def thread_cap() -> int:
    """joblib n_jobs from BIAS_AUDIT_THREADS; unset means every core (-1)"""
    raw = os.environ.get(THREADS_ENV, '').strip()
    if not raw:
        return -1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{raw}'", token=THREADS_ENV) from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got '{raw}'", token=THREADS_ENV)
    return value


@dataclass
class ReplicateOutcome:
    """What one fitted replicate contributes to its sweep index"""
    pred_labels: np.ndarray
    pred_scores: np.ndarray
    records: Dict[MetricKind, DiscriminationRecord]
    degenerate: bool
    group_fraction_a1: float
    permutation: Optional[float] = None
    linear: Optional[float] = None


def _learner_for(spec: LearnerSpec, sample_seed: int) -> LearnerSpec:
    return replace(spec, seed=derive_seed(spec.seed, LEARNER_STREAM, sample_seed))


def _fit_weighted(spec: LearnerSpec, train: Dataset, reweigh: bool):
    weights = reweighing_weights(train).row_weights if reweigh else None
    return fit(spec, train, weights)


def _importance(model, eval_set: Dataset, repeats: int, seed: int) -> Tuple[Optional[float], Optional[float]]:
    index = eval_set.sensitive_feature_index
    if index is None:
        return None, None
    perm = permutation_importance(model, eval_set, index, repeats, seed)
    linear = float(linear_attribution(model, eval_set)[index]) if isinstance(model, LogisticModel) else None
    return perm, linear


def fit_replicate(spec: LearnerSpec, train: Dataset, reweigh: bool, eval_set: Optional[Dataset],
                  metrics: Sequence[MetricKind], sample_seed: int, importance_repeats: int,
                  folds: int = 3) -> ReplicateOutcome:
    """Fit one training sample and score it on the shared evaluation set.

    With no evaluation set the replicate is cross-validated: out-of-fold
    predictions are pooled over its own rows and importance is averaged over
    the fold models.
    """
    spec = _learner_for(spec, sample_seed)
    importance_seed = derive_seed(sample_seed, IMPORTANCE_STREAM, 0)
    fraction_a1 = float(np.mean(train.sensitive == A1))

    if eval_set is not None:
        model = _fit_weighted(spec, train, reweigh)
        labels, scores = predict_batch(model, eval_set)
        perm, linear = _importance(model, eval_set, importance_repeats, importance_seed)
        target = eval_set
        degenerate = model.degenerate
    else:
        if train.n < folds:
            raise ValidationError(f"{train.n} rows cannot be split into {folds} folds")
        order = np.random.default_rng(derive_seed(sample_seed, CV_STREAM, 0)).permutation(train.n)
        fold_of = np.empty(train.n, dtype=np.int64)
        fold_of[order] = np.arange(train.n) % folds
        labels = np.empty(train.n, dtype=np.int64)
        scores = np.empty(train.n)
        perms, linears, degenerate = [], [], False
        for fold in range(folds):
            held = np.flatnonzero(fold_of == fold)
            model = _fit_weighted(spec, train.take(np.flatnonzero(fold_of != fold)), reweigh)
            held_out = train.take(held)
            labels[held], scores[held] = predict_batch(model, held_out)
            perm, linear = _importance(model, held_out, importance_repeats, importance_seed + fold)
            perms.append(perm)
            linears.append(linear)
            degenerate = degenerate or model.degenerate
        perm = None if None in perms else float(np.mean(perms))
        linear = None if None in linears else float(np.mean(linears))
        target = train

    records = {metric: discrimination(metric, labels, scores, target.labels, target.sensitive) for metric in metrics}
    return ReplicateOutcome(labels, scores, records, degenerate, fraction_a1, perm, linear)


def _mean_defined(values) -> Optional[float]:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


class Orchestrator:
    def __init__(self, config: ExperimentConfig, stamp_time: bool = False):
        self.base_path = Path(__file__).parent.parent
        self.data_path = self.base_path / 'docs' / 'data'
        self.config = config
        self.stamp_time = stamp_time
        self.n_jobs = thread_cap()
        self.population: Optional[Dataset] = None
        self.pool: Optional[Dataset] = None
        self.eval_set: Optional[Dataset] = None
        self._reports: Dict[Tuple[str, object], DecompositionReport] = {}

    @property
    def default_output(self) -> Path:
        return self.data_path / f"{self.config.experiment}_results.json"

    # ---- data ------------------------------------------------------------

    def load_population(self) -> Dataset:
        data = self.config.data
        if data.source == 'csv':
            population = load_csv(data.path, data.schema)
        else:
            population = generate_synthetic(**asdict(data.synthetic))
        if data.rebalance is not None:
            population = rebalance_outcome_rates(population, data.rebalance.target_rate_a1,
                                                 data.rebalance.target_rate_a0, data.rebalance.seed)
        return population

    def prepare(self) -> None:
        """Load the population, fix the evaluation set and check every draw is feasible"""
        first_load = self.population is None
        if self.population is None:
            self.population = self.load_population()
        population = self.population
        mode = self.config.eval.mode
        if mode == 'holdout':
            n_eval = round_half_up(self.config.eval.holdout_fraction * population.n)
            if not 0 < n_eval < population.n:
                raise ValidationError(f"holdout of {n_eval} rows leaves no training pool in {population.n} rows")
            rng = np.random.default_rng(derive_seed(self.config.master_seed, HOLDOUT_STREAM, 0))
            order = rng.permutation(population.n)
            self.eval_set = population.take(np.sort(order[:n_eval]), f"holdout eval n={n_eval}")
            self.pool = population.take(np.sort(order[n_eval:]), f"training pool n={population.n - n_eval}")
        elif mode == 'full':
            self.eval_set = population
            self.pool = population
        else:
            self.eval_set = None
            self.pool = population

        if first_load:
            stats = group_stats(population)
            logger.info(f"  Population: {population.n} rows, a1 fraction {stats.group_fraction_a1:.4f}, "
                        f"positive rate a0 {stats.pos_rate_a0} a1 {stats.pos_rate_a1}")
        self.check_feasibility()

    def check_feasibility(self) -> None:
        config = self.config
        pool = self.pool
        counts = {g: int((pool.sensitive == g).sum()) for g in (A0, A1)}
        protocol = config.protocol_name
        if protocol == 'ssb':
            largest = max(config.sizes)
            if largest > pool.n:
                raise ValidationError(f"size {largest} exceeds the training pool of {pool.n} rows")
        elif protocol == 'urb':
            for f1 in config.splits:
                split = Ratio(config.sample_size, f1)
                if split.m1 < 1 or split.m0 < 1:
                    raise ValidationError(f"split f1={f1} at m={config.sample_size} leaves an empty group")
                for group, need in ((A1, split.m1), (A0, split.m0)):
                    if need > counts[group]:
                        raise ValidationError(f"split f1={f1} needs {need} {GROUP_NAMES[group]} rows, "
                                              f"pool has {counts[group]}")
        else:
            growing = config.growing
            if growing.fixed_n > counts[growing.fixed_group]:
                raise ValidationError(f"fixed_n={growing.fixed_n} exceeds the {counts[growing.fixed_group]} "
                                      f"{GROUP_NAMES[growing.fixed_group]} rows in the pool")
            group = growing.growing_group
            if growing.strategy == 'collect':
                available = int(pool.cell_indices(group, 1).shape[0]) if growing.selective else counts[group]
                need = max(growing.growing_sizes)
            else:
                available = counts[group]
                need = growing.growing_sizes[0]
            if need > available:
                raise ValidationError(f"growing {GROUP_NAMES[group]} to {need} needs more rows than the "
                                      f"{available} available")

    # ---- sweeps ----------------------------------------------------------

    def _arms(self) -> Tuple[str, ...]:
        if self.config.experiment == 'mitigation':
            return (UNMITIGATED, REWEIGHING)
        return (REWEIGHING,) if self.config.mitigation == 'reweighing' else (UNMITIGATED,)

    def _evaluate_index(self, index, replicates: Sequence[Dataset], sample_seeds: Sequence[int]) -> List[IndexResult]:
        config = self.config
        entries = []
        for arm in self._arms():
            outcomes = Parallel(n_jobs=self.n_jobs, backend='threading')(
                delayed(fit_replicate)(config.learner, train, arm == REWEIGHING, self.eval_set, config.metrics,
                                       seed, config.importance_repeats, config.eval.folds)
                for train, seed in zip(replicates, sample_seeds)
            )
            entries.append(self._aggregate(arm, index, outcomes))
        return entries

    def _aggregate(self, arm: str, index, outcomes: List[ReplicateOutcome]) -> IndexResult:
        config = self.config
        report = None
        table = None
        if self.eval_set is not None:
            table = PredictionTable(
                eval_ids=self.eval_set.row_ids,
                labels=self.eval_set.labels,
                pred_labels=np.vstack([o.pred_labels for o in outcomes]),
                pred_scores=np.vstack([o.pred_scores for o in outcomes]),
                mode=config.decomposition_mode,
            )
            report = decompose(table, self.eval_set.sensitive)
            self._reports[(arm, index)] = report

        metrics = {}
        for metric in config.metrics:
            records = [o.records[metric] for o in outcomes]
            summary = summarize([r.disc for r in records])
            main_disc = None
            if table is not None:
                main_disc = main_prediction_discrimination(table, self.eval_set.sensitive, metric, report).disc
            metrics[metric.value] = MetricSeries(
                mean_disc=summary.mean,
                std_disc=summary.std,
                ci_low=summary.ci_low,
                ci_high=summary.ci_high,
                n_defined=summary.n_defined,
                repeats=len(records),
                cost_a0_mean=_mean_defined(r.cost_a0 for r in records),
                cost_a1_mean=_mean_defined(r.cost_a1 for r in records),
                main_pred_disc=main_disc,
            )

        importance = None
        if outcomes and outcomes[0].permutation is not None:
            linear = [o.linear for o in outcomes]
            importance = {
                'feature_index': (self.eval_set if self.eval_set is not None else self.pool).sensitive_feature_index,
                'permutation': summarize(o.permutation for o in outcomes).to_dict(),
                'linear': None if None in linear else summarize(linear).to_dict(),
            }

        entry = IndexResult(
            arm=arm,
            index=index,
            metrics=metrics,
            decomposition=None if report is None else report.to_dict(),
            importance=importance,
            degenerate_fits=sum(o.degenerate for o in outcomes),
            train_group_fraction_a1=float(np.mean([o.group_fraction_a1 for o in outcomes])),
        )
        sd = metrics.get(MetricKind.SD.value)
        shown = f", mean Disc(SD)={sd.mean_disc:.4f}" if sd is not None and sd.mean_disc is not None else ''
        logger.info(f"  {index} [{arm}]: {len(outcomes)} replicates{shown}")
        return entry

    def _attach_estimates(self, result: SweepResult) -> SweepResult:
        """Fill in every entry's difference from the reference index of its own arm"""
        for entry in result.series:
            reference = result.entry(result.reference_index, entry.arm)
            split = None
            ref_report = self._reports.get((entry.arm, result.reference_index))
            report = self._reports.get((entry.arm, entry.index))
            if report is not None and ref_report is not None:
                split = ssb_decomposition(report, ref_report)
                entry.decomposition['vs_reference'] = split.to_dict()
            for name, series in entry.metrics.items():
                ref = reference.metrics[name]
                series.estimate = _difference(series.main_pred_disc, ref.main_pred_disc)
                series.mean_estimate = _difference(series.mean_disc, ref.mean_disc)
                if split is not None and name == MetricKind.ZOL.value:
                    series.bias_term = split.bias_term
                    series.variance_term = split.variance_term
        return result

    def _new_result(self, index_name: str, estimate_kind: str, reference) -> SweepResult:
        started = datetime.now(timezone.utc).isoformat().replace('+00:00', 'Z') if self.stamp_time else None
        stats = group_stats(self.population)
        population = {
            'rows': self.population.n,
            'pool_rows': self.pool.n,
            'eval_rows': None if self.eval_set is None else self.eval_set.n,
            'group_fraction_a1': stats.group_fraction_a1,
            'pos_rate_a0': stats.pos_rate_a0,
            'pos_rate_a1': stats.pos_rate_a1,
            'provenance': self.population.provenance,
        }
        return SweepResult(config=self.config.to_dict(), index_name=index_name, estimate_kind=estimate_kind,
                           reference_index=reference, started_at=started, population=population)

    def run_ssb(self) -> SweepResult:
        self.prepare()
        config = self.config
        logger.info("\n=== Running SSB sweep ===")
        result = self._new_result('m', 'ssb', max(config.sizes))
        for i, m in enumerate(config.sizes):
            family = draw_family(self.pool, Protocol(Sized(m), config.repeats, config.master_seed), i)
            seeds = [derive_seed(config.master_seed, i, j) for j in range(config.repeats)]
            result.series.extend(self._evaluate_index(m, family.replicates, seeds))
        return self._attach_estimates(result)

    def run_urb(self) -> SweepResult:
        self.prepare()
        config = self.config
        logger.info("\n=== Running URB sweep ===")
        population_fraction = group_stats(self.population).group_fraction_a1
        reference = min(config.splits, key=lambda f1: abs(f1 - population_fraction))
        result = self._new_result('f1', 'urb', reference)
        for i, f1 in enumerate(config.splits):
            protocol = Protocol(Ratio(config.sample_size, f1), config.repeats, config.master_seed)
            family = draw_family(self.pool, protocol, i)
            seeds = [derive_seed(config.master_seed, i, j) for j in range(config.repeats)]
            result.series.extend(self._evaluate_index(f1, family.replicates, seeds))
        return self._attach_estimates(result)

    def run_mitigation(self) -> SweepResult:
        """Unmitigated and reweighed arms on identical samples and learner seeds"""
        if self.config.experiment != 'mitigation':
            self.config = replace(self.config, experiment='mitigation')
        logger.info("\n=== Running mitigation (reweighing) ===")
        return self.run_urb() if self.config.mitigation_protocol == 'urb' else self.run_ssb()

    def run_augmentation(self) -> SweepResult:
        self.prepare()
        config = self.config
        growing = config.growing
        sizes = growing.growing_sizes
        mode = 'selective' if growing.selective else growing.strategy
        logger.info(f"\n=== Running augmentation sweep ({mode}, growing {GROUP_NAMES[growing.growing_group]}) ===")
        result = self._new_result('growing_size', 'ssb', sizes[-1])

        if growing.strategy == 'collect':
            protocol = Protocol(GrowingGroup(growing.fixed_group, growing.fixed_n, sizes, growing.selective),
                                config.repeats, config.master_seed)
            families = [family.replicates for family in draw_growing_families(self.pool, protocol)]
        else:
            bases = [
                growing_group_series(self.pool, growing.fixed_group, growing.fixed_n, sizes[:1], False,
                                     derive_seed(config.master_seed, 0, j))[0]
                for j in range(config.repeats)
            ]
            families = [
                [grow_group(base, growing.growing_group, size, growing.strategy,
                            derive_seed(config.master_seed, i, j), growing.smote_k)
                 for j, base in enumerate(bases)]
                for i, size in enumerate(sizes)
            ]

        for i, (size, replicates) in enumerate(zip(sizes, families)):
            seeds = [derive_seed(config.master_seed, i, j) for j in range(config.repeats)]
            result.series.extend(self._evaluate_index(size, replicates, seeds))
        return self._attach_estimates(result)

    def run(self) -> SweepResult:
        """Main orchestration loop"""
        experiment = self.config.experiment
        logger.info("=" * 60)
        logger.info(f"SAMPLING-BIAS AUDIT - {experiment}")
        logger.info("=" * 60)
        runners = {
            'ssb': self.run_ssb,
            'urb': self.run_urb,
            'mitigation': self.run_mitigation,
            'augmentation': self.run_augmentation,
        }
        result = runners[experiment]()
        logger.info(f"\nSWEEP COMPLETE: {len(result.series)} series entries")
        return result

    def save_results(self, result: SweepResult, out=None, fmt: str = 'json') -> List[Path]:
        """Save the result document(s); defaults to docs/data/<experiment>_results.json"""
        return save_result(result, out or self.config.output or self.default_output, fmt)


def _difference(value: Optional[float], reference: Optional[float]) -> Optional[float]:
    if value is None or reference is None:
        return None
    return value - reference


def run_experiment(config: ExperimentConfig, stamp_time: bool = False) -> SweepResult:
    return Orchestrator(config, stamp_time).run()


def run_ssb(config: ExperimentConfig) -> SweepResult:
    return Orchestrator(replace(config, experiment='ssb')).run_ssb()


def run_urb(config: ExperimentConfig) -> SweepResult:
    return Orchestrator(replace(config, experiment='urb')).run_urb()


def run_mitigation(config: ExperimentConfig) -> SweepResult:
    return Orchestrator(replace(config, experiment='mitigation')).run_mitigation()


def run_augmentation(config: ExperimentConfig) -> SweepResult:
    return Orchestrator(replace(config, experiment='augmentation')).run_augmentation()


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format='%(message)s')
    orchestrator = Orchestrator(ExperimentConfig(sizes=(30, 300), repeats=5))
    orchestrator.save_results(orchestrator.run())
