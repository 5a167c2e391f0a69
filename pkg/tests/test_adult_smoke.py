"""Smoke run on the public Adult census CSV (headered copy), pointed to by ADULT_CSV"""
import json
import os
from pathlib import Path

import pandas as pd
import pytest

from cli import main
from collectors import A0, DataSchema, group_stats, load_csv

ADULT_CSV = os.environ.get('ADULT_CSV')

pytestmark = pytest.mark.skipif(not ADULT_CSV or not Path(ADULT_CSV).exists(),
                                reason='ADULT_CSV does not point to a file')


def adult_schema():
    header = [c.strip() for c in pd.read_csv(ADULT_CSV, nrows=0).columns]
    sensitive = 'sex' if 'sex' in header else 'gender'
    return {
        'label_column': 'income', 'positive_label': '>50K',
        'sensitive_column': sensitive, 'privileged_value': 'Male',
        'feature_columns': [['age', 'numeric'], ['education', 'categorical']],
    }


def test_female_share():
    ds = load_csv(ADULT_CSV, DataSchema.from_dict(adult_schema()))
    assert group_stats(ds).group_fraction(A0) == pytest.approx(0.31, abs=0.03)


def test_size_sweep_writes_a_result(tmp_path, monkeypatch):
    monkeypatch.setenv('BIAS_AUDIT_THREADS', '2')
    config = tmp_path / 'adult.json'
    config.write_text(json.dumps({
        'data': {'source': 'csv', 'path': ADULT_CSV, 'schema': adult_schema()},
        'learner': {'kind': 'logreg', 'max_iters': 200},
        'importance_repeats': 2,
    }))
    out = tmp_path / 'adult_ssb.json'
    assert main(['ssb', '--config', str(config), '--sizes', '100,500', '--repeats', '3', '--out', str(out)]) == 0
    document = json.loads(out.read_text())
    assert document['schema_version'] == '1'
    assert [entry['index'] for entry in document['series']] == [100, 500]
