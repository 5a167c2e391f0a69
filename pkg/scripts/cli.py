#!/usr/bin/env python3
"""Command-line front end: run sweeps, decompose prediction tables, score predictions.

Exit codes: 0 success, 1 invalid input (nothing written), 2 runtime failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

# Add scripts to path
sys.path.insert(0, str(Path(__file__).parent))

from analyzers.decomposition import (
    DecompositionMode,
    decompose,
    main_prediction_discrimination,
    read_sensitive_csv,
    read_table_csv,
)
from analyzers.fairness_metrics import MetricKind, discrimination
from config import ExperimentConfig, load_config, parse_config
from errors import ConfigError, SchemaError, ValidationError
from learners.base import spec_from_dict
from orchestrator import Orchestrator
from results import SCHEMA_VERSION, atomic_write, render_json

logger = logging.getLogger(__name__)

EXPERIMENT_COMMANDS = {
    'ssb': 'ssb',
    'urb': 'urb',
    'mitigate': 'mitigation',
    'augment': 'augmentation',
}


def parse_metrics(text: str) -> List[MetricKind]:
    tokens = [t for t in text.split(',') if t.strip()]
    if not tokens:
        raise ConfigError("--metrics needs at least one metric name", token=text)
    return [MetricKind.parse(t) for t in tokens]


def parse_sizes(text: str) -> List[int]:
    """'a:b:step' (inclusive of b) or a comma list"""
    try:
        if ':' in text:
            parts = [int(p) for p in text.split(':')]
            if len(parts) != 3 or parts[2] < 1 or parts[1] < parts[0]:
                raise ValueError
            return list(range(parts[0], parts[1] + 1, parts[2]))
        return [int(t) for t in text.split(',') if t.strip()]
    except ValueError:
        raise ConfigError(f"--sizes must look like a:b:step or a comma list of integers, got '{text}'",
                          token=text) from None


def parse_splits(text: str) -> List[float]:
    values = []
    for token in (t for t in text.split(',') if t.strip()):
        try:
            values.append(float(token))
        except ValueError:
            raise ConfigError(f"split '{token.strip()}' is not a number", token=token.strip()) from None
    return values


def _add_experiment_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help='experiment config JSON file')
    parser.add_argument('--seed', type=int, help='master seed')
    parser.add_argument('--repeats', type=int, help='replicates per sweep index')
    parser.add_argument('--out', help='result file path')
    parser.add_argument('--learner', help='learner kind: logreg, tree, knn or forest')
    parser.add_argument('--metrics', help='comma list of FPR,FNR,EO,ZOL,SD,AUC')
    parser.add_argument('--sizes', help='training sizes as a:b:step (inclusive) or a comma list')
    parser.add_argument('--splits', help='comma list of privileged-group fractions')
    parser.add_argument('--format', choices=('json', 'csv', 'both'), default='json')
    parser.add_argument('--stamp-time', action='store_true', help='record the start time in the result')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='bias-audit', description='Sampling-bias audit of fairness measurements')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True)

    for name in EXPERIMENT_COMMANDS:
        _add_experiment_options(sub.add_parser(name, help=f"run the {EXPERIMENT_COMMANDS[name]} sweep"))
    _add_experiment_options(sub.add_parser('validate-config', help='print the normalized config'))

    decompose_cmd = sub.add_parser('decompose', help='decompose an external prediction table')
    decompose_cmd.add_argument('--table', required=True, help='CSV with row_id,label,r0..r{k-1}')
    decompose_cmd.add_argument('--sensitive', required=True, help='CSV with row_id,sensitive (1 = privileged)')
    decompose_cmd.add_argument('--mode', choices=('label', 'score'), default='label')
    decompose_cmd.add_argument('--metrics', help='main-prediction discrimination metrics to include')
    decompose_cmd.add_argument('--out', help='report path (default: standard output)')

    metrics_cmd = sub.add_parser('metrics', help='discrimination of one set of predictions')
    metrics_cmd.add_argument('--predictions', required=True, help='CSV with y,y_hat,sensitive[,score]')
    metrics_cmd.add_argument('--metrics', help='comma list of metrics (default: all)')
    metrics_cmd.add_argument('--out', help='result path (default: standard output)')
    return parser


def configure_logging(args) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(stream=sys.stderr, level=level, format='%(message)s')


def resolve_config(args, experiment: Optional[str]) -> ExperimentConfig:
    """Config file (or defaults), then the subcommand, then command-line overrides"""
    if args.config:
        config = load_config(args.config)
    else:
        config = parse_config({'experiment': experiment} if experiment else {})
    learner = None
    if args.learner:
        kind = args.learner.strip().lower()
        learner = config.learner if config.learner.kind == kind else spec_from_dict({'kind': kind})
    return config.with_overrides(
        experiment=experiment,
        master_seed=args.seed,
        repeats=args.repeats,
        output=args.out,
        learner=learner,
        metrics=parse_metrics(args.metrics) if args.metrics else None,
        sizes=parse_sizes(args.sizes) if args.sizes else None,
        splits=parse_splits(args.splits) if args.splits else None,
    )


def _emit(document, out: Optional[str]) -> None:
    text = render_json(document)
    if out:
        atomic_write(out, text)
        logger.info(f"  Saved to {out}")
    else:
        sys.stdout.write(text)


def cmd_experiment(args) -> int:
    config = resolve_config(args, EXPERIMENT_COMMANDS[args.command])
    orchestrator = Orchestrator(config, stamp_time=args.stamp_time)
    result = orchestrator.run()
    orchestrator.save_results(result, fmt=args.format)
    return 0


def cmd_validate_config(args) -> int:
    config = resolve_config(args, None)
    sys.stdout.write(render_json(config.to_dict()))
    return 0


def cmd_decompose(args) -> int:
    mode = DecompositionMode(args.mode)
    table = read_table_csv(args.table, mode)
    sensitive = read_sensitive_csv(args.sensitive, table.eval_ids)
    report = decompose(table, sensitive)
    metrics = parse_metrics(args.metrics) if args.metrics else [MetricKind.ZOL]
    if table.pred_scores is None and MetricKind.AUC in metrics and mode == DecompositionMode.LABEL:
        logger.warning("  AUC of a label-mode table ranks the majority labels")
    document = {
        'schema_version': SCHEMA_VERSION,
        'mode': mode.value,
        'replicates': table.k,
        'points': table.n,
        'report': report.to_dict(),
        'main_pred_disc': {
            m.value: main_prediction_discrimination(table, sensitive, m, report).to_dict() for m in metrics
        },
    }
    logger.info(f"  max pointwise identity residual {report.max_point_residual:.3g}")
    _emit(document, args.out)
    return 0


def read_predictions(path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"predictions file not found: {path}")
    frame = pd.read_csv(path)
    frame.columns = [c.strip() for c in frame.columns]
    for column in ('y', 'y_hat', 'sensitive'):
        if column not in frame.columns:
            raise SchemaError(f"{path.name} has no '{column}' column", column=column)
    for column in ('y', 'y_hat', 'sensitive'):
        values = frame[column]
        bad = ~values.isin((0, 1))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise ValidationError(f"{path.name} row {row + 1} column {column}: {values.iloc[row]!r} is not 0/1")
    if 'score' in frame.columns:
        scores = pd.to_numeric(frame['score'], errors='coerce')
        if scores.isna().any() or ((scores < 0) | (scores > 1)).any():
            raise ValidationError(f"{path.name} column score must hold numbers in [0, 1]")
    return frame


def cmd_metrics(args) -> int:
    frame = read_predictions(args.predictions)
    scores = frame['score'].to_numpy(dtype=float) if 'score' in frame.columns else None
    if args.metrics:
        metrics = parse_metrics(args.metrics)
    else:
        metrics = [m for m in MetricKind if scores is not None or m != MetricKind.AUC]
    if scores is None and MetricKind.AUC in metrics:
        raise ValidationError("AUC needs a score column")
    records = [
        discrimination(m, frame['y_hat'].to_numpy(dtype=np.int64), scores, frame['y'].to_numpy(dtype=np.int64),
                       frame['sensitive'].to_numpy(dtype=np.int64)).to_dict()
        for m in metrics
    ]
    _emit({'schema_version': SCHEMA_VERSION, 'records': records}, args.out)
    return 0


COMMANDS = {
    'validate-config': cmd_validate_config,
    'decompose': cmd_decompose,
    'metrics': cmd_metrics,
    **{name: cmd_experiment for name in EXPERIMENT_COMMANDS},
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        logger.debug("runtime failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
